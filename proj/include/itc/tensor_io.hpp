#pragma once

#include <iosfwd>
#include <json.hpp>

#include "itc/greens.hpp"
#include "itc/params.hpp"
#include "itc/thermo.hpp"

namespace itc::io {

nlohmann::json to_json(const ModelParams& params);

/// Missing keys keep their ModelParams defaults. Throws InvalidParameters.
ModelParams params_from_json(const nlohmann::json& j);

/// Self-describing header: domain, shape, axes, params, mu, skipped k, warnings.
nlohmann::json tensor_metadata(const greens::GreensTensor& g);

/// CSV body, columns i,j,x,s,re,im; i and j are 1-based sublattice labels,
/// x and s index the axes listed in the metadata.
void write_tensor_csv(std::ostream& os, const greens::GreensTensor& g);

/// Metadata plus {"columns": [...], "rows": [[i, j, x, s, re, im], ...]}.
nlohmann::json tensor_document(const greens::GreensTensor& g);

nlohmann::json thermo_metadata(const thermo::ThermoSeries& series);

/// Columns beta,U,F,S,mu,im_residual.
void write_thermo_csv(std::ostream& os, const thermo::ThermoSeries& series);

nlohmann::json thermo_document(const thermo::ThermoSeries& series);

}  // namespace itc::io
