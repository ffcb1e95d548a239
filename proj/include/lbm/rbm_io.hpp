#pragma once

#include <string>

#include <json.hpp>

#include "lbm/rbm.hpp"

namespace lbm {

inline constexpr int kRbmFormatVersion = 1;

/// Versioned document:
///   {format: "lbm-rbm", version, n_visible, n_hidden, variables,
///    W (row-major), a, b, e0, eps, tau, provenance: [ {source, weight, eps, pos, neg} | null ]}
nlohmann::json rbm_to_json(const Rbm& rbm);
/// Throws ParseError on a missing field, wrong version, or inconsistent shape.
Rbm rbm_from_json(const nlohmann::json& doc);

/// Human-readable energy function, one hidden unit per term, e.g.
///   E = -h1(-x - y - z + 0.5) - h2(x + y - z - 1.5) ...
/// followed by visible-bias and constant terms when nonzero.
std::string energy_listing(const Rbm& rbm);

/// Display name for visible unit i: its table name or x<i+1>.
std::string visible_name(const Rbm& rbm, std::size_t i);

}  // namespace lbm
