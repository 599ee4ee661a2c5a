#include <doctest.h>

#include <cmath>

#include "semsar/report.hpp"

using namespace semsar;

TEST_CASE("configuration readers accept their own output") {
    SceneSpec s;
    s.rows = 40;
    s.target = {20, 30, 10, 18};
    s.shadow = {8, 20, 10, 18};
    s.seed = 99;
    const SceneSpec s2 = scene_spec_from_json(to_json(s));
    CHECK(s2.rows == 40);
    CHECK(s2.target == s.target);
    CHECK(s2.seed == 99);
    CHECK(s2.target_gamma.scale == s.target_gamma.scale);

    MaskSpec m{MaskKind::Mask2, 0.25, 0.25, 1.0};
    const MaskSpec m2 = mask_spec_from_json(to_json(m));
    CHECK(m2.kind == MaskKind::Mask2);
    CHECK(m2.eta_c == 0.25);

    ReconstructConfig rc;
    rc.lambda = 0.7;
    rc.normalise = false;
    rc.tar.lambda0 = 30;
    rc.tar.beta = 2;
    rc.solver.eps = 1e-4;
    const ReconstructConfig rc2 = reconstruct_config_from_json(to_json(rc));
    CHECK(rc2.lambda == 0.7);
    CHECK_FALSE(rc2.normalise);
    CHECK(rc2.tar.lambda0 == 30);
    CHECK(rc2.tar.beta == 2);
    CHECK(rc2.solver.eps == 1e-4);
    CHECK(Json(to_json(rc2)) == to_json(rc));
}

TEST_CASE("unknown keys are rejected") {
    CHECK_THROWS_AS(pipeline_config_from_json(Json{{"lamda", 1.0}}), InvalidInput);
    CHECK_THROWS_AS(scene_spec_from_json(Json{{"rows", 8}, {"colz", 8}}), InvalidInput);
    CHECK_THROWS_AS(reconstruct_config_from_json(Json{{"tar", {{"lambda", 3.0}}}}), InvalidInput);
}

TEST_CASE("partial configs override only the keys given") {
    const PipelineConfig p = pipeline_config_from_json(Json{{"beta", 0.5}});
    CHECK(p.beta == 0.5);
    CHECK(p.lambda0 == PipelineConfig{}.lambda0);
    CHECK(p.max_iter == PipelineConfig{}.max_iter);
}

TEST_CASE("metric reports encode infinity and NaN as null") {
    MetricReport r;
    r.ptcr_db = INFINITY;
    r.chi_t = 2.5;
    const Json j = to_json(r);
    CHECK(j["ptcr_db"].is_null());
    CHECK(j["ptcr_infinite"] == true);
    CHECK(j["recall"].is_null());
    const MetricReport back = metric_report_from_json(j);
    CHECK(back.ptcr_infinite());
    CHECK(back.chi_t == 2.5);
    CHECK(std::isnan(back.recall));

    r.ptcr_db = 12.5;
    r.recall = 0.9;
    const MetricReport b2 = metric_report_from_json(to_json(r));
    CHECK(b2.ptcr_db == 12.5);
    CHECK(b2.recall == 0.9);
}
