#include "doctest.h"

#include <cmath>
#include <random>

#include "wattline/energy_model.hpp"
#include "wattline/errors.hpp"
#include "wattline/numeric.hpp"
#include "wattline/roofline.hpp"
#include "wattline/types.hpp"

using namespace wattline;

namespace {

MeasurementRecord rec(double w, double q, double t, double e) {
    return {"k", "base", Precision::na, w, q, t, e};
}

RooflineModel gtx_dp() {
    return RooflineModel::create("GTX 970", 222.0, CeilingKind::compute, Precision::dp,
                                 {{"fma", CeilingKind::compute, 139.2e9, Precision::dp},
                                  {"no-fma", CeilingKind::compute, 70.2e9,
                                   Precision::dp}});
}

} // namespace

TEST_CASE("enum string round trips") {
    CHECK(to_string(Precision::sp) == "sp");
    CHECK(to_string(Precision::dp) == "dp");
    CHECK(to_string(Precision::na) == "na");
    CHECK(precision_from_string("dp") == Precision::dp);
    CHECK(to_string(CeilingKind::memory) == "memory");
    CHECK(ceiling_kind_from_string("compute") == CeilingKind::compute);
    CHECK(to_string(Boundedness::power_bound) == "power_bound");
    CHECK_THROWS_AS(precision_from_string("quad"), FormatError);
    CHECK_THROWS_AS(ceiling_kind_from_string("io"), FormatError);
}

TEST_CASE("record validation") {
    CHECK_NOTHROW(validate(rec(1e9, 4e9, 1.0, 50.0)));
    CHECK_NOTHROW(validate(rec(1e9, 0.0, 1.0, 0.0))); // zero energy is legal
    CHECK_THROWS_AS(validate(rec(1e9, 4e9, 0.0, 50.0)), DomainError);
    CHECK_THROWS_AS(validate(rec(1e9, 4e9, -1.0, 50.0)), DomainError);
    CHECK_THROWS_AS(validate(rec(1e9, 4e9, 1.0, -1.0)), DomainError);
    CHECK_THROWS_AS(validate(rec(-1.0, 4e9, 1.0, 50.0)), DomainError);
    CHECK_THROWS_AS(validate(rec(0.0, 0.0, 1.0, 50.0)), DomainError);
    CHECK_THROWS_AS(validate(rec(1e9, 4e9, 1.0, NAN)), DomainError);
}

TEST_CASE("derive_metrics ratios") {
    DerivedMetrics m = derive_metrics(rec(1e9, 4e9, 1.0, 50.0));
    CHECK(m.power_w == doctest::Approx(50.0));
    CHECK(m.perf_flops == doctest::Approx(1e9));
    CHECK(m.bandwidth_bps == doctest::Approx(4e9));
    REQUIRE(m.e_w.has_value());
    CHECK(*m.e_w == doctest::Approx(5e-8));
    REQUIRE(m.e_q.has_value());
    CHECK(*m.e_q == doctest::Approx(1.25e-8));
    REQUIRE(m.ee_comp.has_value());
    CHECK(*m.ee_comp == doctest::Approx(2e7));
    REQUIRE(m.ee_mem.has_value());
    CHECK(*m.ee_mem == doctest::Approx(8e7));
}

TEST_CASE("derive_metrics absent fields stay absent") {
    DerivedMetrics m = derive_metrics(rec(0.0, 4e9, 2.0, 10.0));
    CHECK_FALSE(m.e_w.has_value());
    CHECK(m.e_q.has_value());

    m = derive_metrics(rec(1e9, 0.0, 2.0, 0.0));
    CHECK_FALSE(m.ee_comp.has_value());
    CHECK_FALSE(m.ee_mem.has_value());
    REQUIRE(m.e_w.has_value()); // E/W = 0, defined
    CHECK(*m.e_w == 0.0);
}

TEST_CASE("ridge_point paper constants") {
    // 140 W over the Core i7 SP/DP FMA rates, 222 W over the GTX 970 rates.
    CHECK(ridge_point(140.0, 446.4e9) * 1e9 == doctest::Approx(0.3136).epsilon(1e-3));
    CHECK(ridge_point(140.0, 223.8e9) * 1e9 == doctest::Approx(0.6256).epsilon(1e-3));
    CHECK(ridge_point(222.0, 139.2e9) * 1e9 == doctest::Approx(1.595).epsilon(1e-3));
    CHECK(ridge_point(222.0, 3477.5e9) * 1e9 == doctest::Approx(0.0638).epsilon(2e-3));
    CHECK_THROWS_AS(ridge_point(0.0, 1e9), DomainError);
    CHECK_THROWS_AS(ridge_point(140.0, 0.0), DomainError);
}

TEST_CASE("attainable_power min of slope and roof") {
    auto m = RooflineModel::create(
        "GTX 970", 222.0, CeilingKind::compute, Precision::sp,
        {{"fma", CeilingKind::compute, 3477.5e9, Precision::sp},
         {"no-fma", CeilingKind::compute, 1930.7e9, Precision::sp}});
    // Far right of the ridge: the roof.
    CHECK(attainable_power(m, "fma", 1e-9) == doctest::Approx(222.0));
    // Left of it: the slope.
    CHECK(attainable_power(m, "fma", 0.01e-9) == doctest::Approx(34.775));
    CHECK_THROWS_AS(attainable_power(m, "nope", 1e-9), LookupError);
    CHECK_THROWS_AS(attainable_power(m, "fma", 0.0), DomainError);
}

TEST_CASE("classify against the GTX 970 DP ridge") {
    auto m = gtx_dp();
    CHECK(classify(m, 1.72e-9) == Boundedness::power_bound);
    CHECK(classify(m, 1.11e-9) == Boundedness::compute_bound);
    double ridge = ridge_point(222.0, 139.2e9);
    CHECK(classify(m, ridge) == Boundedness::on_ridge);
    CHECK(classify(m, ridge * 1.005) == Boundedness::on_ridge);
    CHECK(classify(m, ridge * 1.02) == Boundedness::power_bound);
    CHECK(classify(m, ridge * 0.98) == Boundedness::compute_bound);
    // Tightening the tolerance moves the near-ridge point off it.
    CHECK(classify(m, "fma", ridge * 1.005, 1e-4) == Boundedness::power_bound);
    // Named-ceiling overload hits the other ceiling's ridge.
    CHECK(classify(m, "no-fma", 1.72e-9) == Boundedness::compute_bound);
}

TEST_CASE("gap_to_roofline") {
    auto m = gtx_dp();
    // Attainable at 1.11 J/GFLOP is 1.11e-9 * 139.2e9 = 154.512 W.
    CHECK(gap_to_roofline(m, "fma", 1.11e-9, 107.0) ==
          doctest::Approx(107.0 / 154.512).epsilon(1e-9));
    // On the roof portion the reference is p_peak.
    CHECK(gap_to_roofline(m, "fma", 1.72e-9, 102.0) ==
          doctest::Approx(102.0 / 222.0).epsilon(1e-9));
    CHECK(gap_to_roofline(m, "fma", 1.72e-9, 222.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(gap_to_roofline(m, "fma", 1.72e-9, 0.0), DomainError);
}

TEST_CASE("model invariants enforced at create") {
    std::vector<Ceiling> sorted = {{"a", CeilingKind::compute, 2e9, Precision::sp},
                                   {"b", CeilingKind::compute, 1e9, Precision::sp}};
    CHECK_NOTHROW(
        RooflineModel::create("p", 100.0, CeilingKind::compute, Precision::sp, sorted));
    // Not sorted descending.
    std::vector<Ceiling> unsorted = {sorted[1], sorted[0]};
    CHECK_THROWS_AS(RooflineModel::create("p", 100.0, CeilingKind::compute,
                                          Precision::sp, unsorted),
                    DomainError);
    // Equal rates.
    std::vector<Ceiling> dup = {{"a", CeilingKind::compute, 2e9, Precision::sp},
                                {"b", CeilingKind::compute, 2e9, Precision::sp}};
    CHECK_THROWS_WITH_AS(RooflineModel::create("p", 100.0, CeilingKind::compute,
                                               Precision::sp, dup),
                         doctest::Contains("equal rates"), DomainError);
    // Duplicate names.
    std::vector<Ceiling> dupname = {{"a", CeilingKind::compute, 2e9, Precision::sp},
                                    {"a", CeilingKind::compute, 1e9, Precision::sp}};
    CHECK_THROWS_AS(RooflineModel::create("p", 100.0, CeilingKind::compute,
                                          Precision::sp, dupname),
                    DomainError);
    // Kind mismatch between model and ceiling.
    std::vector<Ceiling> wrongkind = {{"a", CeilingKind::memory, 2e9, Precision::sp}};
    CHECK_THROWS_AS(RooflineModel::create("p", 100.0, CeilingKind::compute,
                                          Precision::sp, wrongkind),
                    DomainError);
    CHECK_THROWS_AS(
        RooflineModel::create("p", 100.0, CeilingKind::compute, Precision::sp, {}),
        DomainError);
    CHECK_THROWS_AS(RooflineModel::create("p", -1.0, CeilingKind::compute,
                                          Precision::sp, sorted),
                    DomainError);

    auto m = RooflineModel::create("p", 100.0, CeilingKind::compute, Precision::sp,
                                   sorted);
    CHECK(m.top_ceiling().name == "a");
    CHECK(m.find_ceiling("b").rate == doctest::Approx(1e9));
    CHECK_THROWS_AS(m.find_ceiling("zzz"), LookupError);
}

TEST_CASE("fit recovers exact coefficients") {
    std::vector<MeasurementRecord> rs;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uw(1e8, 1e10);
    std::uniform_real_distribution<double> uq(1e7, 1e9);
    for (int i = 0; i < 20; ++i) {
        double w = uw(rng);
        double q = uq(rng);
        double e = w * 1e-9 + q * 5e-9 + 2.0;
        rs.push_back(rec(w, q, 1.0, e));
    }
    EnergyCoefficients c = fit_energy_coefficients(rs);
    CHECK(c.eps_flop == doctest::Approx(1e-9).epsilon(1e-9));
    CHECK(c.eps_mem == doctest::Approx(5e-9).epsilon(1e-9));
    CHECK(c.e0 == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(c.residual_rms < 1e-9);
    CHECK_FALSE(c.clamped);
    CHECK(predict_energy(c, 1e9, 0.0) == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("fit drops an all-zero column") {
    std::vector<MeasurementRecord> rs;
    for (int i = 1; i <= 6; ++i) {
        double w = i * 1e9;
        rs.push_back(rec(w, 0.0, 1.0, w * 2e-9 + 1.0));
    }
    EnergyCoefficients c = fit_energy_coefficients(rs);
    CHECK(c.eps_mem == 0.0);
    CHECK(c.eps_flop == doctest::Approx(2e-9).epsilon(1e-9));
    CHECK(c.e0 == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("fit rejects collinear columns naming them") {
    std::vector<MeasurementRecord> rs;
    for (int i = 1; i <= 6; ++i) {
        double w = i * 1e9;
        rs.push_back(rec(w, 2.0 * w, 1.0, w * 3e-9));
    }
    CHECK_THROWS_WITH_AS(fit_energy_coefficients(rs), doctest::Contains("traffic"),
                         FitError);
}

TEST_CASE("fit rejects underdetermined systems") {
    std::vector<MeasurementRecord> rs = {rec(1e9, 1e8, 1.0, 2.0),
                                         rec(2e9, 3e8, 1.0, 4.0)};
    CHECK_THROWS_AS(fit_energy_coefficients(rs), FitError);
}

TEST_CASE("fit clamps negative coefficients and reflags residual") {
    // Two points on a line with negative intercept; only W and the
    // intercept are active, so the raw fit is exact with e0 = -0.2.
    std::vector<MeasurementRecord> rs = {rec(1e9, 0.0, 1.0, 0.9),
                                         rec(2e9, 0.0, 1.0, 2.0)};
    EnergyCoefficients c = fit_energy_coefficients(rs);
    CHECK(c.clamped);
    CHECK(c.e0 == 0.0);
    CHECK(c.residual_rms > 0.0); // honest residual for the clamped model
}

TEST_CASE("predict_energy rejects negative inputs") {
    EnergyCoefficients c{1e-9, 5e-9, 2.0, 0.0, false};
    CHECK_THROWS_AS(predict_energy(c, -1.0, 0.0), DomainError);
}

TEST_CASE("pairwise_sum and median") {
    std::vector<double> v(1000, 0.1);
    CHECK(pairwise_sum(v) == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(median({3.0, 1.0, 2.0}) == doctest::Approx(2.0));
    CHECK(median({4.0, 1.0, 3.0, 2.0}) == doctest::Approx(2.5));
    CHECK_THROWS_AS(median({}), DomainError);
    CHECK(round_sig(0.31358, 2) == doctest::Approx(0.31));
    CHECK(round_sig(1.59483, 3) == doctest::Approx(1.59));
}
