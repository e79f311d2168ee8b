#include <cmath>
#include <fstream>

#include "doctest.h"
#include "phidon/optim.hpp"
#include "phidon/rng.hpp"

using namespace phidon;

namespace {

/// small single-interface training fixture
struct TrainFixture {
    DomainDecomposition dec = make_interval_decomposition({0.5}, 0.0, 1.0);
    PdeProblem problem;
    CollocationSet colloc;
    std::vector<InputFunctionSample> samples;
    std::vector<std::vector<double>> u_at_pde;
    ModelConfig cfg;

    TrainFixture(int n_samples, int m) {
        problem.dec = &dec;
        problem.kappa = {5.0, 0.1};
        colloc = sample_collocation(dec, m, 2, 2, 77);
        Rng rng(101);
        for (int i = 0; i < n_samples; ++i) {
            InputFunctionSample u;
            u.per_subdomain = {{rng.normal(), rng.normal(), rng.normal()},
                               {rng.normal(), rng.normal(), rng.normal()}};
            samples.push_back(u);
            std::vector<double> uv(m);
            for (int j = 0; j < m; ++j) uv[j] = 1.0 + 0.3 * rng.normal();
            u_at_pde.push_back(uv);
        }
        cfg.branch_hidden = {8};
        cfg.trunk_hidden = {8};
        cfg.num_basis = 4;
    }

    OperatorModel make_model(std::uint64_t seed) const {
        return make_phi_deeponet(dec, make_nce_embedding(2, 2, Activation::Tanh, seed),
                                 {3, 3}, cfg, true, seed);
    }
};

}  // namespace

namespace {

constexpr double kQuarterPi = 0.78539816339744830962;

std::vector<ParamBlock> one_block(std::vector<double>& theta) {
    return {{theta.data(), static_cast<int>(theta.size()), 1}};
}

}  // namespace

TEST_CASE("adam_step: zero gradient, hand-evaluated first step") {
    TrainConfig cfg;
    cfg.learning_rate = 0.1;

    std::vector<double> theta{0.3, -0.5};
    std::vector<double> g{0.0, 0.0};
    auto params = one_block(theta);
    auto grads = one_block(g);
    AdamState st;
    st.init(params);
    adam_step(st, params, grads, cfg);
    CHECK(theta == std::vector<double>{0.3, -0.5});
    CHECK(st.step == 1);

    std::vector<double> t2{0.0};
    std::vector<double> g2{1.0};
    auto p2 = one_block(t2);
    auto gr2 = one_block(g2);
    AdamState st2;
    st2.init(p2);
    adam_step(st2, p2, gr2, cfg);
    CHECK(t2[0] == doctest::Approx(-0.1 / (1.0 + 1e-8)).epsilon(1e-12));

    g2[0] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(adam_step(st2, p2, gr2, cfg), std::runtime_error);
}

TEST_CASE("adam converges on a quadratic bowl") {
    TrainConfig cfg;
    cfg.learning_rate = 0.05;
    std::vector<double> theta{0.0};
    std::vector<double> g{0.0};
    auto params = one_block(theta);
    auto grads = one_block(g);
    AdamState st;
    st.init(params);
    for (int i = 0; i < 2000; ++i) {
        g[0] = 2.0 * (theta[0] - 3.0);
        adam_step(st, params, grads, cfg);
        if (std::abs(theta[0] - 3.0) < 1e-3) break;
    }
    CHECK(std::abs(theta[0] - 3.0) < 1e-3);
}

TEST_CASE("adam_step is a pure function of state, params, grads and config") {
    TrainConfig cfg;
    Rng rng(5);
    std::vector<double> theta(6), g(6);
    for (auto& v : theta) v = rng.normal();
    for (auto& v : g) v = rng.normal();

    auto run = [&]() {
        std::vector<double> t = theta, gr = g;
        auto p = one_block(t);
        auto gb = one_block(gr);
        AdamState st;
        st.init(p);
        for (int i = 0; i < 3; ++i) adam_step(st, p, gb, cfg);
        return t;
    };
    CHECK(run() == run());
}

TEST_CASE("soap_step: zero gradient keeps parameters, bowl at least as fast as adam") {
    TrainConfig cfg;
    cfg.learning_rate = 0.05;

    std::vector<double> theta{1.0, -2.0};
    std::vector<double> g{0.0, 0.0};
    auto params = one_block(theta);
    auto grads = one_block(g);
    SoapState st;
    st.init(params);
    soap_step(st, params, grads, cfg);
    CHECK(theta == std::vector<double>{1.0, -2.0});

    // ill-conditioned quadratic with rotated curvature: f = 0.5 g' H g,
    // H = R' diag(100, 0.01) R at 45 degrees, where diagonal methods stall
    const double c = std::cos(kQuarterPi), s = std::sin(kQuarterPi);
    const double h11 = 100 * c * c + 0.01 * s * s;
    const double h12 = (100 - 0.01) * c * s;
    const double h22 = 100 * s * s + 0.01 * c * c;
    auto iters_to_converge = [&](bool use_soap) {
        std::vector<double> t{4.0, 4.0};
        std::vector<double> gr{0.0, 0.0};
        auto p = one_block(t);
        auto gb = one_block(gr);
        AdamState sa;
        SoapState ss;
        if (use_soap)
            ss.init(p);
        else
            sa.init(p);
        for (int i = 1; i <= 20000; ++i) {
            gr[0] = h11 * t[0] + h12 * t[1];
            gr[1] = h12 * t[0] + h22 * t[1];
            if (use_soap)
                soap_step(ss, p, gb, cfg);
            else
                adam_step(sa, p, gb, cfg);
            if (std::abs(t[0]) < 1e-3 && std::abs(t[1]) < 1e-3) return i;
        }
        return 20000;
    };
    // on a plain 1D bowl the rotation is trivial and SOAP's trajectory
    // coincides with Adam's
    auto bowl_iters = [&](bool use_soap) {
        std::vector<double> t{0.0};
        std::vector<double> gr{0.0};
        auto p = one_block(t);
        auto gb = one_block(gr);
        AdamState sa;
        SoapState ss;
        if (use_soap)
            ss.init(p);
        else
            sa.init(p);
        for (int i = 1; i <= 5000; ++i) {
            gr[0] = 2.0 * (t[0] - 3.0);
            if (use_soap)
                soap_step(ss, p, gb, cfg);
            else
                adam_step(sa, p, gb, cfg);
            if (std::abs(t[0] - 3.0) < 1e-3) return i;
        }
        return 5000;
    };
    const int adam_bowl = bowl_iters(false);
    const int soap_bowl = bowl_iters(true);
    CHECK(soap_bowl <= adam_bowl);

    // rotated ill-conditioned sanity bound
    const int adam_iters = iters_to_converge(false);
    const int soap_iters = iters_to_converge(true);
    CHECK(soap_iters <= 2 * adam_iters);
}

TEST_CASE("train: lr = 0 is an identity on parameters") {
    TrainFixture f(2, 6);
    OperatorModel m = f.make_model(3);
    const std::string before = model_to_json(m).dump();
    TrainConfig cfg;
    cfg.learning_rate = 0.0;
    cfg.epochs = 3;
    const auto hist = train(m, f.problem, f.samples, f.u_at_pde, f.colloc, cfg);
    CHECK(hist.epochs.size() == 3);
    CHECK(model_to_json(m).dump() == before);
    CHECK(hist.epochs[0].total == hist.epochs[2].total);
}

TEST_CASE("train: deterministic, loss decreases, history is recorded") {
    TrainFixture f(3, 8);
    TrainConfig cfg;
    cfg.learning_rate = 5e-3;
    cfg.epochs = 60;
    auto run = [&]() {
        OperatorModel m = f.make_model(11);
        const auto hist = train(m, f.problem, f.samples, f.u_at_pde, f.colloc, cfg);
        return std::pair{hist.epochs.back().total, model_to_json(m).dump()};
    };
    const auto [loss_a, model_a] = run();
    const auto [loss_b, model_b] = run();
    CHECK(loss_a == loss_b);  // bitwise reproducible
    CHECK(model_a == model_b);

    OperatorModel m = f.make_model(11);
    const auto hist = train(m, f.problem, f.samples, f.u_at_pde, f.colloc, cfg);
    CHECK(hist.epochs.size() == 60);
    CHECK(hist.epochs.back().total < hist.epochs.front().total);
    for (const auto& l : hist.epochs)
        CHECK(l.total == doctest::Approx(l.pde + l.bc + l.interface_value + l.interface_flux)
                             .epsilon(1e-12));
}

TEST_CASE("train: soap is a drop-in optimizer") {
    TrainFixture f(2, 6);
    OperatorModel m = f.make_model(19);
    TrainConfig cfg;
    cfg.learning_rate = 5e-3;
    cfg.epochs = 30;
    cfg.optimizer = OptimizerKind::Soap;
    const auto hist = train(m, f.problem, f.samples, f.u_at_pde, f.colloc, cfg);
    CHECK(hist.epochs.size() == 30);
    CHECK(hist.epochs.back().total < hist.epochs.front().total);
}

TEST_CASE("train: divergence detection aborts with an error") {
    TrainFixture f(2, 6);
    OperatorModel m = f.make_model(23);
    TrainConfig cfg;
    cfg.learning_rate = 1e6;  // absurd step size
    cfg.epochs = 200;
    CHECK_THROWS_AS(train(m, f.problem, f.samples, f.u_at_pde, f.colloc, cfg),
                    TrainDivergenceError);
}

TEST_CASE("history CSV has the documented columns") {
    TrainFixture f(2, 6);
    OperatorModel m = f.make_model(29);
    TrainConfig cfg;
    cfg.learning_rate = 5e-3;
    cfg.epochs = 4;
    const auto hist = train(m, f.problem, f.samples, f.u_at_pde, f.colloc, cfg);
    const std::string path = "/tmp/phidon_test_history.csv";
    write_history_csv(path, hist);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "epoch,L_pde,L_bc,L_int,total,seconds");
    int rows = 0;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 4);
}
