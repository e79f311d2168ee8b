#include "phidon/embedding.hpp"

#include <cmath>
#include <stdexcept>

#include "phidon/rng.hpp"

namespace phidon {

std::string to_string(Embedding::Variant v) {
    switch (v) {
        case Embedding::Variant::SE: return "se";
        case Embedding::Variant::CE: return "ce";
        case Embedding::Variant::NCE: return "nce";
    }
    return "?";
}

Embedding::Variant embedding_variant_from_string(const std::string& s) {
    if (s == "se") return Embedding::Variant::SE;
    if (s == "ce") return Embedding::Variant::CE;
    if (s == "nce") return Embedding::Variant::NCE;
    throw std::invalid_argument("unknown embedding variant: " + s);
}

Embedding make_se_embedding(int num_subdomains) {
    Embedding e;
    e.variant = Embedding::Variant::SE;
    e.latent_dim = 1;
    e.num_subdomains = num_subdomains;
    return e;
}

namespace {
Mat xavier_matrix(int rows, int cols, int fan_in, int fan_out, std::uint64_t seed) {
    Mat m(rows, cols);
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    Rng rng(mix_seed(seed, 0x656d62 /* "emb" */));
    for (double& v : m.data) v = rng.uniform(-bound, bound);
    return m;
}
}  // namespace

Embedding make_ce_embedding(int num_subdomains, int latent_dim, std::uint64_t seed) {
    if (latent_dim < 1) throw std::invalid_argument("embedding: latent_dim must be >= 1");
    Embedding e;
    e.variant = Embedding::Variant::CE;
    e.latent_dim = latent_dim;
    e.num_subdomains = num_subdomains;
    e.matrix = xavier_matrix(latent_dim, num_subdomains, num_subdomains, latent_dim, seed);
    return e;
}

Embedding make_nce_embedding(int num_subdomains, int latent_dim, Activation sigma,
                             std::uint64_t seed) {
    Embedding e = make_ce_embedding(num_subdomains, latent_dim, seed);
    e.variant = Embedding::Variant::NCE;
    e.sigma = sigma;
    return e;
}

std::vector<double> embed_forced(const Embedding& emb, int q) {
    if (q < 1 || q > emb.num_subdomains)
        throw std::invalid_argument("embed_forced: subdomain index out of range");
    switch (emb.variant) {
        case Embedding::Variant::SE:
            return {static_cast<double>(q)};
        case Embedding::Variant::CE: {
            std::vector<double> phi(emb.latent_dim);
            for (int d = 0; d < emb.latent_dim; ++d) phi[d] = emb.matrix(d, q - 1);
            return phi;
        }
        case Embedding::Variant::NCE: {
            std::vector<double> phi(emb.latent_dim);
            for (int d = 0; d < emb.latent_dim; ++d)
                phi[d] = act_eval(emb.sigma, emb.matrix(d, q - 1)).v;
            return phi;
        }
    }
    return {};
}

std::vector<double> embed(const Embedding& emb, const DomainDecomposition& dec, const Point& y) {
    return embed_forced(emb, subdomain_of(dec, y));
}

void embedding_gradient(const Embedding& emb, int q, std::span<const double> upstream,
                        Mat& egrad) {
    if (!emb.trainable())
        throw std::invalid_argument("embedding_gradient: SE has no trainable parameters");
    if (q < 1 || q > emb.num_subdomains)
        throw std::invalid_argument("embedding_gradient: subdomain index out of range");
    if (static_cast<int>(upstream.size()) != emb.latent_dim)
        throw std::invalid_argument("embedding_gradient: upstream dimension mismatch");
    for (int d = 0; d < emb.latent_dim; ++d) {
        double slope = 1.0;
        if (emb.variant == Embedding::Variant::NCE)
            slope = act_eval(emb.sigma, emb.matrix(d, q - 1)).d1;
        egrad(d, q - 1) += upstream[d] * slope;
    }
}

nlohmann::json embedding_to_json(const Embedding& emb) {
    nlohmann::json j;
    j["variant"] = to_string(emb.variant);
    j["latent_dim"] = emb.latent_dim;
    j["num_subdomains"] = emb.num_subdomains;
    if (emb.trainable()) {
        nlohmann::json rows = nlohmann::json::array();
        for (int d = 0; d < emb.latent_dim; ++d) {
            nlohmann::json row = nlohmann::json::array();
            for (int p = 0; p < emb.num_subdomains; ++p) row.push_back(emb.matrix(d, p));
            rows.push_back(std::move(row));
        }
        j["matrix"] = std::move(rows);
    }
    if (emb.variant == Embedding::Variant::NCE) j["activation"] = to_string(emb.sigma);
    return j;
}

Embedding embedding_from_json(const nlohmann::json& j) {
    Embedding e;
    e.variant = embedding_variant_from_string(j.at("variant").get<std::string>());
    e.latent_dim = j.at("latent_dim").get<int>();
    e.num_subdomains = j.at("num_subdomains").get<int>();
    if (e.trainable()) {
        e.matrix = Mat(e.latent_dim, e.num_subdomains);
        const auto& rows = j.at("matrix");
        for (int d = 0; d < e.latent_dim; ++d)
            for (int p = 0; p < e.num_subdomains; ++p)
                e.matrix(d, p) = rows.at(d).at(p).get<double>();
    }
    if (e.variant == Embedding::Variant::NCE)
        e.sigma = activation_from_string(j.at("activation").get<std::string>());
    return e;
}

}  // namespace phidon
