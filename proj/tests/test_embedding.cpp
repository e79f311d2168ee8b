#include <cmath>

#include "doctest.h"
#include "phidon/embedding.hpp"
#include "phidon/rng.hpp"

using namespace phidon;

TEST_CASE("scalar embedding returns the 1-based subdomain index") {
    const auto dec = make_interval_decomposition({0.5}, 0.0, 1.0);
    const auto emb = make_se_embedding(2);
    CHECK(embed(emb, dec, {0.75}) == std::vector<double>{2.0});
    CHECK(embed(emb, dec, {0.25}) == std::vector<double>{1.0});
    const auto emb5 = make_se_embedding(5);
    CHECK(embed_forced(emb5, 3) == std::vector<double>{3.0});
    CHECK(emb.num_params() == 0);
    CHECK_THROWS_AS(embed_forced(emb, 3), std::invalid_argument);
}

TEST_CASE("categorical embedding selects matrix columns") {
    Embedding emb = make_ce_embedding(2, 2, 0);
    emb.matrix.set_zero();
    emb.matrix(0, 0) = 1.0;
    emb.matrix(1, 1) = 1.0;
    const auto dec = make_interval_decomposition({0.5}, 0.0, 1.0);
    CHECK(embed(emb, dec, {0.1}) == std::vector<double>{1.0, 0.0});
    CHECK(embed(emb, dec, {0.9}) == std::vector<double>{0.0, 1.0});

    Embedding rnd = make_ce_embedding(4, 3, 7);
    CHECK(rnd.num_params() == 12);
    for (int q = 1; q <= 4; ++q) {
        const auto phi = embed_forced(rnd, q);
        for (int d = 0; d < 3; ++d) CHECK(phi[d] == rnd.matrix(d, q - 1));
    }
}

TEST_CASE("nonlinear embedding wraps the projection in an activation") {
    Embedding emb = make_nce_embedding(2, 2, Activation::Tanh, 0);
    emb.matrix.set_zero();
    emb.matrix(0, 0) = 1.0;
    emb.matrix(1, 1) = 1.0;
    const auto dec = make_interval_decomposition({0.5}, 0.0, 1.0);
    const auto phi = embed(emb, dec, {0.1});
    CHECK(phi[0] == doctest::Approx(0.761594).epsilon(1e-6));
    CHECK(phi[1] == doctest::Approx(0.0));
}

TEST_CASE("embed agrees with embed_forced at the natural subdomain") {
    const auto dec = make_interval_decomposition({0.2, 0.4, 0.6, 0.8}, 0.0, 1.0);
    const Embedding emb = make_nce_embedding(5, 3, Activation::Tanh, 3);
    Rng rng(21);
    for (int i = 0; i < 10000; ++i) {
        const Point y{rng.uniform(0.0, 1.0)};
        CHECK(embed(emb, dec, y) == embed_forced(emb, subdomain_of(dec, y)));
    }
}

TEST_CASE("embedding is piecewise constant per subdomain") {
    const auto dec = make_interval_decomposition({0.5}, 0.0, 1.0);
    const Embedding emb = make_nce_embedding(2, 4, Activation::Gelu, 5);
    Rng rng(2);
    for (int i = 0; i < 1000; ++i) {
        const Point a{rng.uniform(0.0, 1.0)}, b{rng.uniform(0.0, 1.0)};
        if (subdomain_of(dec, a) == subdomain_of(dec, b))
            CHECK(embed(emb, dec, a) == embed(emb, dec, b));
    }
}

TEST_CASE("embedding gradients: active column only, NCE slope, FD agreement") {
    Embedding ce = make_ce_embedding(3, 2, 0);
    Mat g(2, 3);
    embedding_gradient(ce, 2, std::vector<double>{1.0, 0.0}, g);
    CHECK(g(0, 1) == 1.0);
    int nonzero = 0;
    for (double v : g.data)
        if (v != 0.0) ++nonzero;
    CHECK(nonzero == 1);

    // NCE at E = 0: tanh'(0) = 1 so the gradient matches the CE case
    Embedding nce = make_nce_embedding(3, 2, Activation::Tanh, 0);
    nce.matrix.set_zero();
    Mat gn(2, 3);
    embedding_gradient(nce, 2, std::vector<double>{1.0, 0.0}, gn);
    CHECK(gn.data == g.data);

    // random NCE against finite differences on a scalar functional
    Embedding rnd = make_nce_embedding(4, 3, Activation::Tanh, 11);
    Rng rng(8);
    const std::vector<double> upstream{rng.uniform(-1, 1), rng.uniform(-1, 1),
                                       rng.uniform(-1, 1)};
    const int q = 3;
    Mat grad(3, 4);
    embedding_gradient(rnd, q, upstream, grad);
    const double h = 1e-6;
    for (int d = 0; d < 3; ++d)
        for (int p = 0; p < 4; ++p) {
            const double save = rnd.matrix(d, p);
            rnd.matrix(d, p) = save + h;
            const auto fp = embed_forced(rnd, q);
            rnd.matrix(d, p) = save - h;
            const auto fm = embed_forced(rnd, q);
            rnd.matrix(d, p) = save;
            double fd = 0.0;
            for (int k = 0; k < 3; ++k) fd += upstream[k] * (fp[k] - fm[k]) / (2 * h);
            CHECK(std::abs(grad(d, p) - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
        }

    const Embedding se = make_se_embedding(3);
    Mat gs(1, 3);
    CHECK_THROWS_AS(embedding_gradient(se, 1, std::vector<double>{1.0}, gs),
                    std::invalid_argument);
}

TEST_CASE("embedding JSON round-trip") {
    const Embedding nce = make_nce_embedding(5, 3, Activation::Tanh, 77);
    const auto j = embedding_to_json(nce);
    const Embedding back = embedding_from_json(nlohmann::json::parse(j.dump()));
    CHECK(back.variant == nce.variant);
    CHECK(back.latent_dim == nce.latent_dim);
    CHECK(back.matrix.data == nce.matrix.data);
    CHECK(back.sigma == nce.sigma);

    const auto se = make_se_embedding(2);
    const Embedding se_back = embedding_from_json(nlohmann::json::parse(embedding_to_json(se).dump()));
    CHECK(se_back.variant == Embedding::Variant::SE);
    CHECK(se_back.num_params() == 0);
}
