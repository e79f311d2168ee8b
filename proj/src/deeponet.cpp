#include "phidon/deeponet.hpp"

#include <stdexcept>

#include "phidon/mlp_autodiff.hpp"
#include "phidon/rng.hpp"

namespace phidon {

void OperatorModel::validate() const {
    if (dec == nullptr) throw std::invalid_argument("OperatorModel: missing decomposition");
    if (branches.empty()) throw std::invalid_argument("OperatorModel: no branch networks");
    const int k = trunk.spec.output_dim;
    for (const Mlp& br : branches)
        if (br.spec.output_dim != k)
            throw std::invalid_argument("OperatorModel: branch/trunk basis count mismatch");
    const int expected = baseline ? dec->dim : dec->dim + embedding.dim();
    if (trunk.spec.input_dim != expected)
        throw std::invalid_argument("OperatorModel: trunk input dim mismatch");
    if (!baseline && static_cast<int>(branches.size()) != dec->num_subdomains)
        throw std::invalid_argument("OperatorModel: one branch per subdomain required");
}

OperatorModel make_phi_deeponet(const DomainDecomposition& dec, Embedding embedding,
                                const std::vector<int>& sensors_per_subdomain,
                                const ModelConfig& cfg, bool hard_bc, std::uint64_t seed) {
    if (static_cast<int>(sensors_per_subdomain.size()) != dec.num_subdomains)
        throw std::invalid_argument("make_phi_deeponet: sensor counts per subdomain required");
    OperatorModel m;
    m.baseline = false;
    m.hard_bc = hard_bc;
    m.dec = &dec;
    m.embedding = std::move(embedding);
    for (int q = 0; q < dec.num_subdomains; ++q) {
        MlpSpec spec;
        spec.input_dim = sensors_per_subdomain[q];
        spec.hidden_widths = cfg.branch_hidden;
        spec.output_dim = cfg.num_basis;
        spec.activation = cfg.activation;
        m.branches.push_back(mlp_init(spec, mix_seed(seed, 10 + q)));
    }
    MlpSpec trunk_spec;
    trunk_spec.input_dim = dec.dim + m.embedding.dim();
    trunk_spec.hidden_widths = cfg.trunk_hidden;
    trunk_spec.output_dim = cfg.num_basis;
    trunk_spec.activation = cfg.activation;
    m.trunk = mlp_init(trunk_spec, mix_seed(seed, 1));
    m.validate();
    return m;
}

OperatorModel make_deeponet_baseline(const DomainDecomposition& dec, int total_sensors,
                                     const ModelConfig& cfg, bool hard_bc, std::uint64_t seed) {
    OperatorModel m;
    m.baseline = true;
    m.hard_bc = hard_bc;
    m.dec = &dec;
    MlpSpec spec;
    spec.input_dim = total_sensors;
    spec.hidden_widths = cfg.branch_hidden;
    spec.output_dim = cfg.num_basis;
    spec.activation = cfg.activation;
    m.branches.push_back(mlp_init(spec, mix_seed(seed, 10)));
    MlpSpec trunk_spec;
    trunk_spec.input_dim = dec.dim;
    trunk_spec.hidden_widths = cfg.trunk_hidden;
    trunk_spec.output_dim = cfg.num_basis;
    trunk_spec.activation = cfg.activation;
    m.trunk = mlp_init(trunk_spec, mix_seed(seed, 1));
    m.validate();
    return m;
}

std::vector<double> branch_coefficients(const OperatorModel& model,
                                        const InputFunctionSample& u) {
    if (model.baseline) {
        return mlp_forward(model.branches[0], u.concatenated());
    }
    if (u.per_subdomain.size() != model.branches.size())
        throw std::invalid_argument("branch_coefficients: subdomain count mismatch");
    std::vector<double> prod(model.num_basis(), 1.0);
    for (size_t q = 0; q < model.branches.size(); ++q) {
        const auto out = mlp_forward(model.branches[q], u.per_subdomain[q]);
        for (int k = 0; k < model.num_basis(); ++k) prod[k] *= out[k];
    }
    return prod;
}

std::vector<double> trunk_input(const OperatorModel& model, const Point& y,
                                std::optional<int> side) {
    std::vector<double> in(y.begin(), y.end());
    if (!model.baseline) {
        const auto phi = side ? embed_forced(model.embedding, *side)
                              : embed(model.embedding, *model.dec, y);
        in.insert(in.end(), phi.begin(), phi.end());
    }
    return in;
}

double forward(const OperatorModel& model, const InputFunctionSample& u, const Point& y,
               std::optional<int> side) {
    const auto b = branch_coefficients(model, u);
    const auto t = mlp_forward(model.trunk, trunk_input(model, y, side));
    double s = 0.0;
    for (int k = 0; k < model.num_basis(); ++k) s += b[k] * t[k];
    if (model.hard_bc) {
        const auto& hc = model.dec->hard;
        s = hc.lambda.value(y) * s + hc.lift.value(y);
    }
    return s;
}

double forward_baseline(const OperatorModel& model, const InputFunctionSample& u,
                        const Point& y) {
    if (!model.baseline)
        throw std::invalid_argument("forward_baseline: model is not a baseline DeepONet");
    return forward(model, u, y);
}

SpatialEval forward_with_spatial_derivatives(const OperatorModel& model,
                                             const InputFunctionSample& u, const Point& y,
                                             std::optional<int> side) {
    const int d = model.spatial_dim();
    const auto b = branch_coefficients(model, u);
    const auto in = trunk_input(model, y, side);

    // seed directions: spatial unit vectors, zero rows for phi inputs
    std::vector<double> dirs(in.size() * d, 0.0);
    for (int a = 0; a < d; ++a) dirs[static_cast<size_t>(a) * d + a] = 1.0;
    const MlpEval ev = mlp_eval(model.trunk, in, dirs, d, 2);

    SpatialEval out;
    out.grad.assign(d, 0.0);
    for (int k = 0; k < model.num_basis(); ++k) {
        out.value += b[k] * ev.value()[k];
        for (int a = 0; a < d; ++a) out.grad[a] += b[k] * ev.jac(k, a);
        out.lap += b[k] * ev.laplacian(k);
    }

    if (model.hard_bc) {
        const auto& hc = model.dec->hard;
        const double lam = hc.lambda.value(y);
        const auto lam_g = hc.lambda.grad(y);
        const double lam_l = hc.lambda.lap(y);
        const double lift = hc.lift.value(y);
        const auto lift_g = hc.lift.grad(y);
        const double lift_l = hc.lift.lap(y);

        SpatialEval hcd;
        hcd.value = lam * out.value + lift;
        hcd.grad.assign(d, 0.0);
        double cross = 0.0;
        for (int a = 0; a < d; ++a) {
            hcd.grad[a] = lam * out.grad[a] + lam_g[a] * out.value + lift_g[a];
            cross += lam_g[a] * out.grad[a];
        }
        hcd.lap = lam * out.lap + 2.0 * cross + lam_l * out.value + lift_l;
        return hcd;
    }
    return out;
}

void ModelGrads::init_like(const OperatorModel& model) {
    branches.resize(model.branches.size());
    for (size_t q = 0; q < model.branches.size(); ++q) branches[q].init_like(model.branches[q]);
    trunk.init_like(model.trunk);
    if (model.embedding.trainable())
        embedding = Mat(model.embedding.latent_dim, model.embedding.num_subdomains);
    else
        embedding = Mat();
}

void ModelGrads::set_zero() {
    for (auto& g : branches) g.set_zero();
    trunk.set_zero();
    embedding.set_zero();
}

namespace {
void collect_mlp_blocks(std::vector<Mat>& ws, std::vector<std::vector<double>>& bs,
                        std::vector<ParamBlock>& out) {
    for (size_t l = 0; l < ws.size(); ++l) {
        out.push_back({ws[l].data.data(), ws[l].rows, ws[l].cols});
        out.push_back({bs[l].data(), static_cast<int>(bs[l].size()), 1});
    }
}
}  // namespace

std::vector<ParamBlock> parameter_blocks(OperatorModel& model) {
    std::vector<ParamBlock> out;
    for (Mlp& br : model.branches) collect_mlp_blocks(br.weights, br.biases, out);
    collect_mlp_blocks(model.trunk.weights, model.trunk.biases, out);
    if (model.embedding.trainable())
        out.push_back({model.embedding.matrix.data.data(), model.embedding.latent_dim,
                       model.embedding.num_subdomains});
    return out;
}

std::vector<ParamBlock> gradient_blocks(ModelGrads& grads) {
    std::vector<ParamBlock> out;
    for (MlpGrad& g : grads.branches) collect_mlp_blocks(g.dw, g.db, out);
    collect_mlp_blocks(grads.trunk.dw, grads.trunk.db, out);
    if (!grads.embedding.data.empty())
        out.push_back({grads.embedding.data.data(), grads.embedding.rows, grads.embedding.cols});
    return out;
}

nlohmann::json model_to_json(const OperatorModel& model) {
    nlohmann::json j;
    j["format"] = "phidon-model-v1";
    j["baseline"] = model.baseline;
    j["hard_bc"] = model.hard_bc;
    if (!model.baseline) j["embedding"] = embedding_to_json(model.embedding);
    nlohmann::json branches = nlohmann::json::array();
    for (const Mlp& br : model.branches) branches.push_back(mlp_to_json(br));
    j["branches"] = std::move(branches);
    j["trunk"] = mlp_to_json(model.trunk);
    return j;
}

OperatorModel model_from_json(const nlohmann::json& j) {
    if (j.at("format").get<std::string>() != "phidon-model-v1")
        throw std::invalid_argument("model_from_json: unknown format");
    OperatorModel m;
    m.baseline = j.at("baseline").get<bool>();
    m.hard_bc = j.at("hard_bc").get<bool>();
    if (!m.baseline) m.embedding = embedding_from_json(j.at("embedding"));
    for (const auto& bj : j.at("branches")) m.branches.push_back(mlp_from_json(bj));
    m.trunk = mlp_from_json(j.at("trunk"));
    return m;
}

}  // namespace phidon
