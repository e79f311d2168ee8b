#pragma once

#include <memory>
#include <string>

#include "phidon/deeponet.hpp"
#include "phidon/grf.hpp"
#include "phidon/optim.hpp"
#include "phidon/oracle.hpp"
#include "phidon/physics.hpp"

namespace phidon {

enum class BenchmarkId { B1, B2, B3, B4, B5, B6 };

std::string to_string(BenchmarkId id);
BenchmarkId benchmark_from_string(const std::string& s);

/// A fully wired benchmark problem: geometry, PDE data, input-function
/// model, sensor layout, dataset sizes and collocation budget.
struct BenchmarkInstance {
    BenchmarkId id = BenchmarkId::B1;
    std::shared_ptr<DomainDecomposition> dec;
    PdeProblem problem;  // references *dec

    bool piecewise_inputs = false;   // independent GRF draw per subdomain
    bool parametric_inputs = false;  // forcing family (p1, p2 r^2)
    double grf_mean = 1.0;
    double grf_length_scale = 0.2;

    std::vector<std::vector<Point>> sensors;  // per subdomain
    int n_train = 0;                          // printed sizes; desk scale divides by 5
    int n_test = 0;
    int m_pde = 0;
    int b_bc = 0;
    int t_per_interface = 0;
    int grid_n = 0;  // evaluation/oracle grid nodes (per axis in 2D)

    // parametric forcing box (B6)
    double param_lo = 2.0;
    double param_hi = 20.0;

    std::vector<int> sensors_per_subdomain() const;
    int total_sensors() const;
};

BenchmarkInstance make_benchmark(BenchmarkId id);

struct DatasetConfig {
    std::uint64_t seed = 0;
    bool paper_scale = false;  // desk scale (default): N/5, floors 80 train / 20 test
    int n_train_override = -1;
    int n_test_override = -1;
    int sensors_override = -1;  // 1D benchmarks only
};

/// In-memory dataset: per-sample sensor values, exact forcing values at the
/// PDE collocation points, and oracle solutions on the evaluation grid for
/// the test split. One collocation set is shared by all samples.
struct Dataset {
    BenchmarkId id = BenchmarkId::B1;
    DatasetConfig config;
    int n_train = 0;
    int n_test = 0;
    std::vector<InputFunctionSample> train_samples, test_samples;
    std::vector<std::vector<double>> train_u_pde, test_u_pde;
    std::vector<std::vector<double>> test_truth;  // per sample, on eval_grid
    CollocationSet colloc;
    std::vector<Point> eval_grid;
    std::vector<int> eval_side;  // natural subdomain of each grid point
};

Dataset generate_dataset(const BenchmarkInstance& bench, const DatasetConfig& cfg);

/// Persists a dataset as manifest.json plus CSV tables (17 significant
/// digits; regeneration with the same seed is byte-identical).
void write_dataset(const BenchmarkInstance& bench, const Dataset& data, const std::string& dir);

enum class EmbeddingChoice { SE, CE, NCE, DeepOnet };
std::string to_string(EmbeddingChoice c);
EmbeddingChoice embedding_choice_from_string(const std::string& s);

struct RunOptions {
    EmbeddingChoice embedding = EmbeddingChoice::NCE;
    int latent_dim = 3;
    bool hard_bc = true;
    ModelConfig model;
    TrainConfig train;   // desk default below
    DatasetConfig dataset;
    std::uint64_t seed = 0;  // model init; also dataset seed unless set apart

    RunOptions() { train.epochs = 2000; }
};

struct RunResult {
    BenchmarkId id = BenchmarkId::B1;
    std::string embedding;
    int latent_dim = 0;
    std::uint64_t seed = 0;
    double mean_rel_l2 = 0.0;
    double median_rel_l2 = 0.0;
    std::vector<double> per_sample;
    double train_seconds = 0.0;
    LossBreakdown initial_loss, final_loss;
};

OperatorModel build_model(const BenchmarkInstance& bench, const Dataset& data,
                          const RunOptions& opt);

/// Train on the dataset's train split and report relative L2 errors of the
/// grid predictions against the oracle solutions on the test split.
RunResult run_benchmark(const BenchmarkInstance& bench, const Dataset& data,
                        const RunOptions& opt, OperatorModel* model_out = nullptr,
                        TrainHistory* history_out = nullptr);

/// Grid predictions for each sample (trunk outputs cached per grid point).
std::vector<std::vector<double>> evaluate_on_grid(const OperatorModel& model,
                                                  std::span<const InputFunctionSample> samples,
                                                  std::span<const Point> grid,
                                                  std::span<const int> side);

/// Per-sample relative L2 errors of a trained model on a dataset's test split.
std::vector<double> test_errors(const BenchmarkInstance& bench, const Dataset& data,
                                const OperatorModel& model);

struct OodResult {
    std::vector<double> mus, lss;
    std::vector<std::vector<double>> mean_errors;  // [mu][ls]
};

/// Out-of-distribution sweep for the GRF benchmarks: fresh test sets drawn
/// at each (mu, ls) and evaluated with the given trained model. Length
/// scales above the training value are rejected.
OodResult ood_sweep(const BenchmarkInstance& bench, const OperatorModel& model,
                    const std::vector<double>& mus, const std::vector<double>& lss, int n_test,
                    std::uint64_t seed);

enum class AblationAxis { NTrain, TrunkDepth, Sensors, LatentDim };
std::string to_string(AblationAxis a);
AblationAxis ablation_axis_from_string(const std::string& s);

struct AblationResult {
    AblationAxis axis = AblationAxis::NTrain;
    std::vector<double> values;
    std::vector<double> mean_errors;  // seed-averaged mean rel-L2 per value
};

AblationResult ablate(const BenchmarkInstance& bench, AblationAxis axis,
                      const std::vector<double>& values, const RunOptions& base,
                      const std::vector<std::uint64_t>& seeds);

struct OracleCheckLine {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct OracleCheckReport {
    BenchmarkId id = BenchmarkId::B1;
    std::vector<OracleCheckLine> lines;
    bool all_passed() const;
};

/// Manufactured-solution and convergence checks for the benchmark's
/// ground-truth pipeline.
OracleCheckReport oracle_check(BenchmarkId id);

// --- persistence helpers ---

void write_run_result(const RunResult& result, const std::string& dir);
nlohmann::json run_result_to_json(const RunResult& result);
void write_model_bundle(const OperatorModel& model, BenchmarkId id, const std::string& path);
/// Loads a model bundle and rebinds it to the benchmark's decomposition.
OperatorModel load_model_bundle(const std::string& path, const BenchmarkInstance& bench);
void write_ood_csv(const OodResult& ood, const std::string& path);
void write_ablation_csv(const AblationResult& ab, const std::string& path);

}  // namespace phidon
