#pragma once

#include <cstdint>
#include <span>

#include "phidon/geometry.hpp"
#include "phidon/mlp.hpp"

namespace phidon {

/// Latent interface variable phi. SE prescribes the subdomain index as a
/// scalar; CE projects the one-hot subdomain indicator through a learned
/// D x P matrix; NCE additionally wraps the projection in an element-wise
/// activation.
struct Embedding {
    enum class Variant { SE, CE, NCE };

    Variant variant = Variant::SE;
    int latent_dim = 1;       // D (1 for SE)
    int num_subdomains = 1;   // P
    Mat matrix;               // D x P, empty for SE
    Activation sigma = Activation::Tanh;  // NCE only

    int dim() const { return latent_dim; }
    bool trainable() const { return variant != Variant::SE; }
    int num_params() const { return trainable() ? latent_dim * num_subdomains : 0; }
};

Embedding make_se_embedding(int num_subdomains);
/// Matrix entries Xavier-uniform with fan_in = P, fan_out = D.
Embedding make_ce_embedding(int num_subdomains, int latent_dim, std::uint64_t seed);
Embedding make_nce_embedding(int num_subdomains, int latent_dim, Activation sigma,
                             std::uint64_t seed);

/// phi for a forced subdomain index q (1-based), regardless of location.
std::vector<double> embed_forced(const Embedding& emb, int q);

/// phi at a point: embed_forced with q = subdomain_of(dec, y).
std::vector<double> embed(const Embedding& emb, const DomainDecomposition& dec, const Point& y);

/// Accumulates d(loss)/dE given the adjoint of phi for subdomain q. Only
/// column q receives contributions; NCE includes the activation slope.
/// Throws std::invalid_argument for SE (no trainable parameters).
void embedding_gradient(const Embedding& emb, int q, std::span<const double> upstream,
                        Mat& egrad);

nlohmann::json embedding_to_json(const Embedding& emb);
Embedding embedding_from_json(const nlohmann::json& j);

std::string to_string(Embedding::Variant v);
Embedding::Variant embedding_variant_from_string(const std::string& s);

}  // namespace phidon
