#pragma once

#include <nlohmann/json.hpp>

#include "semsar/datagen.hpp"
#include "semsar/eval.hpp"

// JSON views of configurations and results. Readers start from the default
// value and override only the keys present; unknown keys are rejected so that
// a misspelt parameter cannot silently fall back to its default.

namespace semsar {

using Json = nlohmann::ordered_json;

Json to_json(const MaskSpec& m);
MaskSpec mask_spec_from_json(const Json& j);

Json to_json(const SceneSpec& s);
SceneSpec scene_spec_from_json(const Json& j, SceneSpec base = {});

Json to_json(const SolverConfig& c);
SolverConfig solver_config_from_json(const Json& j, SolverConfig base = {});

Json to_json(const RegConfig& c);
RegConfig reg_config_from_json(const Json& j, RegConfig base = {});

Json to_json(const PipelineConfig& c);
PipelineConfig pipeline_config_from_json(const Json& j, PipelineConfig base = {});

Json to_json(const ReconstructConfig& c);
ReconstructConfig reconstruct_config_from_json(const Json& j, ReconstructConfig base = {});

Json to_json(const SemanticFeatures& f);
Json to_json(const SolveReport& r);
Json to_json(const IterationDiagnostics& d);
/// Diagnostics of a whole run (images and label maps are written separately).
Json to_json(const RunResult& r);

/// Infinite PTCR is written as null with "ptcr_infinite": true; NaN fields as null.
Json to_json(const MetricReport& m);
MetricReport metric_report_from_json(const Json& j);

} // namespace semsar
