#pragma once

#include "fv/current.hpp"
#include "fv/density.hpp"
#include "fv/finsler.hpp"
#include "fv/jacobian.hpp"
#include "fv/seminorm.hpp"

#include <string>

namespace fv::io {

/// Norm spec:
///   {"kind":"ellipsoid","Q":[[...]]}
///   {"kind":"polytope_vertices","V":[[...]]}
///   {"kind":"polytope_facets","H":[[...]]}
///   {"kind":"lp","p":number|"inf","scales":[...]}  (or "dim":n)
///   {"kind":"pullback","base":{...},"L":[[...]]}
/// Matrices are row-major arrays of rows, IEEE doubles.
SemiNorm parse_norm(const std::string& json_text);
std::string norm_to_json(const SemiNorm& s);

/// Atlas: {"charts":[{"box":[[lo,hi],...],"map":{...},
///                    "target_norm":{...},"bilip":[l,u]}]}
/// Map specs: {"kind":"identity"} | {"kind":"linear","matrix":[[...]]}
///            | {"kind":"expr","components":["...", ...]}
/// Target norms may instead be fields:
///   {"kind":"ellipsoid_field","Q":[["expr",...],...]} (entries in
///   target coordinates).
Atlas parse_atlas(const std::string& json_text);

/// Current: {"atlas":{...},"theta":[...],"sigma":{...}}
/// theta entries: number | {"const":c} | {"expr":"..."} |
///                {"piecewise":[{"box":...,"value":...}]}
DeskCurrent parse_current(const std::string& json_text);

/// Form: {"f": number|"expr"|{"indicator":[[...box...]]}, "pi": map}
TestForm parse_form(const std::string& json_text, int target_dim);

/// Region: [[ [lo,hi],... ], ...] or "all".
BoxUnion parse_region(const std::string& json_text);

MapSpec parse_map(const std::string& json_text);

JacobianKind parse_kind(const std::string& name, const std::string& sigma_json, int dim);

std::string to_json(const JacobianResult& r, double j_ir_sigma = -1.0);
std::string to_json(const ConvexBodyVolume& v);
std::string to_json(const FinslerVolume& v);
std::string to_json(const MassResult& m, const std::string& method);
std::string to_json(const MassComparison& c);
std::string to_json(const ConvexityReport& r);
std::string to_json(const AxiomCheckReport& r, const std::string& kind);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace fv::io
