#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "phidon/bench.hpp"

namespace {

using namespace phidon;

std::vector<double> parse_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stod(item));
    }
    if (out.empty()) throw std::invalid_argument("empty list: " + csv);
    return out;
}

struct TrainArgs {
    std::string benchmark = "B1";
    std::string embedding = "nce";
    int latent_dim = 3;
    int epochs = 2000;
    double lr = 5e-3;
    std::string optimizer = "adam";
    std::uint64_t seed = 0;
    std::string hard_bc = "on";
    std::string out;
    bool paper_scale = false;
    int n_train = -1;
    int n_test = -1;
};

RunOptions to_options(const TrainArgs& a) {
    RunOptions opt;
    opt.embedding = embedding_choice_from_string(a.embedding);
    opt.latent_dim = a.latent_dim;
    opt.hard_bc = a.hard_bc == "on";
    opt.train.epochs = a.paper_scale && a.epochs == 2000 ? 5000 : a.epochs;
    opt.train.learning_rate = a.lr;
    opt.train.optimizer = optimizer_from_string(a.optimizer);
    opt.train.seed = a.seed;
    opt.seed = a.seed;
    opt.dataset.seed = a.seed;
    opt.dataset.paper_scale = a.paper_scale;
    opt.dataset.n_train_override = a.n_train;
    opt.dataset.n_test_override = a.n_test;
    return opt;
}

int cmd_generate(const std::string& benchmark, std::uint64_t seed, const std::string& out,
                 bool paper_scale) {
    const BenchmarkInstance bench = make_benchmark(benchmark_from_string(benchmark));
    DatasetConfig cfg;
    cfg.seed = seed;
    cfg.paper_scale = paper_scale;
    const Dataset data = generate_dataset(bench, cfg);
    write_dataset(bench, data, out);
    std::printf("wrote %s dataset (%d train, %d test) to %s\n", benchmark.c_str(), data.n_train,
                data.n_test, out.c_str());
    return 0;
}

int cmd_train(const TrainArgs& a) {
    const BenchmarkInstance bench = make_benchmark(benchmark_from_string(a.benchmark));
    const RunOptions opt = to_options(a);
    const Dataset data = generate_dataset(bench, opt.dataset);

    OperatorModel model;
    TrainHistory history;
    const RunResult result = run_benchmark(bench, data, opt, &model, &history);

    namespace fs = std::filesystem;
    fs::create_directories(a.out);
    write_model_bundle(model, bench.id, (fs::path(a.out) / "model.json").string());
    write_history_csv((fs::path(a.out) / "history.csv").string(), history);
    write_run_result(result, a.out);
    const std::string dim_tag =
        result.latent_dim > 0 ? "(D=" + std::to_string(result.latent_dim) + ")" : "";
    std::printf("%s %s%s seed=%llu: mean rel-L2 %.6g, median %.6g (%.1f s)\n",
                a.benchmark.c_str(), result.embedding.c_str(), dim_tag.c_str(),
                static_cast<unsigned long long>(result.seed), result.mean_rel_l2,
                result.median_rel_l2, result.train_seconds);
    return 0;
}

int cmd_evaluate(const std::string& model_path, const std::string& benchmark,
                 const std::string& split, std::uint64_t seed, bool paper_scale,
                 const std::string& out) {
    if (split != "test") throw std::invalid_argument("only --split test is available");
    const BenchmarkInstance bench = make_benchmark(benchmark_from_string(benchmark));
    const OperatorModel model = load_model_bundle(model_path, bench);
    DatasetConfig cfg;
    cfg.seed = seed;
    cfg.paper_scale = paper_scale;
    const Dataset data = generate_dataset(bench, cfg);
    const auto errs = test_errors(bench, data, model);
    double mean = 0.0;
    for (double e : errs) mean += e;
    mean /= errs.size();
    std::printf("%s test split (%zu samples): mean rel-L2 %.6g\n", benchmark.c_str(),
                errs.size(), mean);
    if (!out.empty()) {
        namespace fs = std::filesystem;
        fs::create_directories(out);
        std::FILE* f = std::fopen((fs::path(out) / "eval_errors.csv").string().c_str(), "w");
        std::fprintf(f, "sample,rel_l2\n");
        for (size_t i = 0; i < errs.size(); ++i) std::fprintf(f, "%zu,%.17g\n", i, errs[i]);
        std::fclose(f);
    }
    return 0;
}

int cmd_ood(const std::string& benchmark, const std::string& mu_list, const std::string& ls_list,
            const std::string& model_path, int n_test, std::uint64_t seed,
            const std::string& out) {
    const BenchmarkInstance bench = make_benchmark(benchmark_from_string(benchmark));
    const OperatorModel model = load_model_bundle(model_path, bench);
    const OodResult res =
        ood_sweep(bench, model, parse_list(mu_list), parse_list(ls_list), n_test, seed);
    for (size_t mi = 0; mi < res.mus.size(); ++mi)
        for (size_t li = 0; li < res.lss.size(); ++li)
            std::printf("mu=%.3g ls=%.3g: mean rel-L2 %.6g\n", res.mus[mi], res.lss[li],
                        res.mean_errors[mi][li]);
    if (!out.empty()) write_ood_csv(res, out);
    return 0;
}

int cmd_ablate(const std::string& benchmark, const std::string& axis,
               const std::string& values, const TrainArgs& base, int num_seeds,
               const std::string& out) {
    const BenchmarkInstance bench = make_benchmark(benchmark_from_string(benchmark));
    std::vector<std::uint64_t> seeds;
    for (int s = 0; s < num_seeds; ++s) seeds.push_back(base.seed + s);
    const AblationResult res = ablate(bench, ablation_axis_from_string(axis),
                                      parse_list(values), to_options(base), seeds);
    for (size_t i = 0; i < res.values.size(); ++i)
        std::printf("%s=%g: mean rel-L2 %.6g\n", axis.c_str(), res.values[i],
                    res.mean_errors[i]);
    if (!out.empty()) write_ablation_csv(res, out);
    return 0;
}

int cmd_oracle_check(const std::string& benchmark) {
    const OracleCheckReport rep = oracle_check(benchmark_from_string(benchmark));
    for (const auto& line : rep.lines)
        std::printf("[%s] %s: %s\n", line.passed ? "PASS" : "FAIL", line.name.c_str(),
                    line.detail.c_str());
    return rep.all_passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"physics-informed operator learning for elliptic interface problems"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "generate a benchmark dataset");
    std::string g_bench = "B1", g_out = "dataset";
    std::uint64_t g_seed = 0;
    bool g_paper = false;
    gen->add_option("--benchmark", g_bench, "B1..B6");
    gen->add_option("--seed", g_seed, "dataset seed");
    gen->add_option("--out", g_out, "output directory")->required();
    gen->add_flag("--paper-scale", g_paper, "use the printed dataset sizes");

    // train
    auto* tr = app.add_subcommand("train", "train a model and evaluate on the test split");
    TrainArgs ta;
    tr->add_option("--benchmark", ta.benchmark, "B1..B6");
    tr->add_option("--embedding", ta.embedding, "se|ce|nce|deeponet");
    tr->add_option("--latent-dim", ta.latent_dim, "embedding dimension D");
    tr->add_option("--epochs", ta.epochs, "training epochs");
    tr->add_option("--lr", ta.lr, "learning rate");
    tr->add_option("--optimizer", ta.optimizer, "adam|soap");
    tr->add_option("--seed", ta.seed, "model/dataset seed");
    tr->add_option("--hard-bc", ta.hard_bc, "on|off");
    tr->add_option("--out", ta.out, "output directory")->required();
    tr->add_flag("--paper-scale", ta.paper_scale, "printed sizes and 5000 epochs");
    tr->add_option("--n-train", ta.n_train, "override the training sample count");
    tr->add_option("--n-test", ta.n_test, "override the test sample count");

    // evaluate
    auto* ev = app.add_subcommand("evaluate", "evaluate a saved model on a dataset split");
    std::string e_model, e_bench = "B1", e_split = "test", e_out;
    std::uint64_t e_seed = 0;
    bool e_paper = false;
    ev->add_option("--model", e_model, "model bundle JSON")->required();
    ev->add_option("--benchmark", e_bench, "B1..B6");
    ev->add_option("--split", e_split, "test");
    ev->add_option("--seed", e_seed, "dataset seed");
    ev->add_flag("--paper-scale", e_paper, "printed dataset sizes");
    ev->add_option("--out", e_out, "output directory");

    // ood
    auto* ood = app.add_subcommand("ood", "out-of-distribution sweep over (mu, ls)");
    std::string o_bench = "B1", o_mu = "1.0", o_ls = "0.2", o_model, o_out;
    int o_ntest = 50;
    std::uint64_t o_seed = 0;
    ood->add_option("--benchmark", o_bench, "B1|B2");
    ood->add_option("--mu", o_mu, "comma-separated means");
    ood->add_option("--ls", o_ls, "comma-separated length scales (<= training value)");
    ood->add_option("--model", o_model, "trained model bundle")->required();
    ood->add_option("--n-test", o_ntest, "samples per cell");
    ood->add_option("--seed", o_seed, "sweep seed");
    ood->add_option("--out", o_out, "CSV output path");

    // ablate
    auto* ab = app.add_subcommand("ablate", "one run per value along an ablation axis");
    std::string a_axis = "n_train", a_values = "50,200,800", a_out;
    TrainArgs ab_base;
    int a_seeds = 1;
    ab->add_option("--benchmark", ab_base.benchmark, "B1..B6");
    ab->add_option("--axis", a_axis, "n_train|trunk_depth|sensors|latent_dim");
    ab->add_option("--values", a_values, "comma-separated values");
    ab->add_option("--embedding", ab_base.embedding, "se|ce|nce|deeponet");
    ab->add_option("--latent-dim", ab_base.latent_dim, "embedding dimension D");
    ab->add_option("--epochs", ab_base.epochs, "training epochs");
    ab->add_option("--lr", ab_base.lr, "learning rate");
    ab->add_option("--seed", ab_base.seed, "base seed");
    ab->add_option("--seeds", a_seeds, "number of consecutive seeds to average");
    ab->add_option("--out", a_out, "CSV output path");

    // oracle-check
    auto* oc = app.add_subcommand("oracle-check", "validate the ground-truth pipeline");
    std::string c_bench = "B1";
    oc->add_option("--benchmark", c_bench, "B1..B6");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed()) return cmd_generate(g_bench, g_seed, g_out, g_paper);
        if (tr->parsed()) return cmd_train(ta);
        if (ev->parsed()) return cmd_evaluate(e_model, e_bench, e_split, e_seed, e_paper, e_out);
        if (ood->parsed()) return cmd_ood(o_bench, o_mu, o_ls, o_model, o_ntest, o_seed, o_out);
        if (ab->parsed())
            return cmd_ablate(ab_base.benchmark, a_axis, a_values, ab_base, a_seeds, a_out);
        if (oc->parsed()) return cmd_oracle_check(c_bench);
    } catch (const phidon::TrainDivergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
