#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>
#include <string>

#include "vct/population.hpp"
#include "vct/units.hpp"

using namespace vct;

namespace {

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

} // namespace

TEST_CASE("parameter tables declare the sampling design") {
  const auto& ht = hovorka_param_table();
  REQUIRE(ht.size() == 17);
  CHECK(ht[0].name == "tau_S");
  CHECK(ht[16].name == "BW");
  const std::set<std::size_t> banded = {0, 2, 3, 4, 5, 10, 11};
  const std::set<std::size_t> per_kg = {1, 12, 13, 14};
  for (std::size_t i = 0; i < ht.size(); ++i) {
    CHECK((ht[i].tc_reference > 0.0) == (banded.count(i) == 1));
    CHECK(ht[i].per_kg == (per_kg.count(i) == 1));
  }
  CHECK(ht[0].tc_reference == doctest::Approx(1.0 / 0.018));

  const auto& ut = uvapadova_param_table();
  REQUIRE(ut.size() == 26);
  CHECK(ut[0].name == "BW");
  for (const auto& ps : ut) {
    CHECK(ps.tc_reference == 0.0);
    CHECK_FALSE(ps.per_kg);
  }

  CHECK(to_string(ModelKind::Hovorka) == "hovorka");
  CHECK(model_kind_from_string("uvapadova") == ModelKind::UvaPadova);
  CHECK_THROWS_AS(model_kind_from_string("minimal"), ConfigError);
}

TEST_CASE("deviation is measured in generating-normal units") {
  DistributionSpec n{DistKind::Normal, 10.0, 2.0, DistTransform::None};
  CHECK(*normal_deviation(n, 13.0) == doctest::Approx(1.5).epsilon(1e-12));

  DistributionSpec ln{DistKind::LogNormal, std::log(5.0), 0.3, DistTransform::None};
  CHECK(*normal_deviation(ln, 5.0 * std::exp(0.6)) ==
        doctest::Approx(2.0).epsilon(1e-12));

  DistributionSpec rec{DistKind::Normal, 0.018, 0.0045, DistTransform::Reciprocal};
  CHECK(*normal_deviation(rec, 1.0 / 0.0225) == doctest::Approx(1.0).epsilon(1e-12));

  DistributionSpec u{DistKind::Uniform, 0.7, 0.5, DistTransform::None};
  CHECK_FALSE(normal_deviation(u, 0.9).has_value());
  DistributionSpec fx{DistKind::Fixed, 15.0, 0.0, DistTransform::None};
  CHECK_FALSE(normal_deviation(fx, 15.0).has_value());
}

TEST_CASE("reciprocal sampling never divides by a non-positive base") {
  DistributionSpec spec{DistKind::Normal, 0.0, 1.0, DistTransform::Reciprocal};
  NoiseStream rng(3, 0, StreamPurpose::Sampling);
  for (int i = 0; i < 50; ++i) {
    const double v = sample_parameter(spec, rng);
    CHECK(std::isfinite(v));
    CHECK(v > 0.0);
  }
}

TEST_CASE("mean draws build the nominal models") {
  const auto hd = mean_draws(ModelKind::Hovorka);
  REQUIRE(hd.size() == 17);
  CHECK(hd[16] == 80.0);
  const auto hp = build_hovorka_params(hd);
  const auto hn = nominal_hovorka_params(80.0);
  CHECK(hp.tau_S == doctest::Approx(hn.tau_S).epsilon(1e-12));
  CHECK(hp.V_G == doctest::Approx(hn.V_G).epsilon(1e-12));
  CHECK(hp.EGP_0 == doctest::Approx(hn.EGP_0).epsilon(1e-12));
  CHECK(hp.k_12 == hn.k_12);

  const auto ud = mean_draws(ModelKind::UvaPadova);
  REQUIRE(ud.size() == 26);
  CHECK(ud[0] == doctest::Approx(70.492));
  const auto up = build_uvapadova_params(ud);
  const auto un = nominal_uvapadova_params();
  CHECK(up.G_b == un.G_b);
  CHECK(up.I_b == un.I_b);
  CHECK(up.K_m0 == un.K_m0);
}

TEST_CASE("screening accepts the mean participant of either model") {
  double u_ss = 0.0;
  CHECK(screen_draws(ModelKind::Hovorka, mean_draws(ModelKind::Hovorka), &u_ss) ==
        RejectionRule::None);
  CHECK(u_ss == doctest::Approx(7.532534861789518).epsilon(1e-9));
  CHECK(mU_per_min_to_units_per_hour(u_ss) ==
        doctest::Approx(0.4519520917073711).epsilon(1e-9));

  CHECK(screen_draws(ModelKind::UvaPadova, mean_draws(ModelKind::UvaPadova), &u_ss) ==
        RejectionRule::None);
  CHECK(u_ss == doctest::Approx(75.14511392442895).epsilon(1e-9));
  CHECK(pmol_per_min_to_units_per_hour(u_ss) ==
        doctest::Approx(0.7514511392442896).epsilon(1e-9));
}

TEST_CASE("each rejection rule fires on its own violation") {
  auto d = mean_draws(ModelKind::Hovorka);
  d[2] = 0.14 + 1.5 * 0.035; // insulin elimination, 1.5 SD out
  CHECK(screen_draws(ModelKind::Hovorka, d) == RejectionRule::OneSd);

  d = mean_draws(ModelKind::Hovorka);
  d[3] = 0.001; // within 1 SD of its wide prior, but an order of magnitude off
  CHECK(screen_draws(ModelKind::Hovorka, d) == RejectionRule::TimeConstant);

  d = mean_draws(ModelKind::Hovorka);
  d[16] = 70.0; // lighter body, same per-kg fluxes: basal need drops below 0.4 U/h
  double u_ss = 0.0;
  CHECK(screen_draws(ModelKind::Hovorka, d, &u_ss) == RejectionRule::Basal);
  CHECK(mU_per_min_to_units_per_hour(u_ss) ==
        doctest::Approx(0.39545808024394996).epsilon(1e-9));

  CHECK_THROWS_AS(screen_draws(ModelKind::Hovorka, std::vector<double>(3)),
                  std::invalid_argument);
}

TEST_CASE("sampling is reproducible and participants are independent") {
  const auto a = sample_participant(ModelKind::Hovorka, 7, 3);
  const auto b = sample_participant(ModelKind::Hovorka, 7, 3);
  CHECK(a.draws == b.draws);
  CHECK(a.given_name == b.given_name);
  CHECK(a.date_of_birth == b.date_of_birth);
  CHECK(a.basal_u_ss == b.basal_u_ss);

  const auto c3 = generate_cohort(3, ModelKind::Hovorka, 7);
  const auto c5 = generate_cohort(5, ModelKind::Hovorka, 7);
  REQUIRE(c3.participants.size() == 3);
  REQUIRE(c5.participants.size() == 5);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(c3.participants[i].id == i + 1);
    CHECK(c3.participants[i].draws == c5.participants[i].draws);
    CHECK(c3.participants[i].family_name == c5.participants[i].family_name);
  }
  CHECK(c3.participants[2].draws == a.draws);

  const auto other_seed = sample_participant(ModelKind::Hovorka, 8, 3);
  CHECK(other_seed.draws != a.draws);
}

TEST_CASE("rejection accounting balances") {
  RejectionCounts counts;
  const auto c = generate_cohort(3, ModelKind::Hovorka, 11, &counts);
  CHECK(counts.total_attempts ==
        counts.one_sd + counts.time_constant + counts.basal + c.participants.size());
  CHECK(counts.one_sd > 0); // dominant rule by far
}

TEST_CASE("demographics are plausible") {
  const auto c = generate_cohort(4, ModelKind::Hovorka, 19);
  for (const auto& r : c.participants) {
    CHECK_FALSE(r.given_name.empty());
    CHECK_FALSE(r.family_name.empty());
    CHECK_FALSE(r.place_of_birth.empty());
    REQUIRE(r.date_of_birth.size() == 10);
    CHECK(r.date_of_birth[4] == '-');
    CHECK(r.date_of_birth[7] == '-');
    const int year = std::stoi(r.date_of_birth.substr(0, 4));
    CHECK(year >= 1953);
    CHECK(year <= 2006);
    CHECK(r.height_cm >= 145.0);
    CHECK(r.height_cm <= 200.0);
    CHECK(r.body_weight_kg == r.draws[16]);
    CHECK(r.body_weight_kg >= 65.0);
    CHECK(r.body_weight_kg <= 95.0);
    CHECK(basal_units_per_hour(r) >= 0.4);
  }
}

TEST_CASE("cohort files round-trip exactly") {
  const auto path = temp_path("vct_test_cohort_a.tsv");
  const auto c = generate_cohort(3, ModelKind::Hovorka, 23);
  save_cohort(c, path);
  const auto back = load_cohort(path);
  CHECK(back.model_kind == c.model_kind);
  CHECK(back.master_seed == c.master_seed);
  CHECK(cohort_to_string(back) == cohort_to_string(c));
  std::remove(path.c_str());

  const auto path_b = temp_path("vct_test_cohort_b.tsv");
  const auto cb = generate_cohort(2, ModelKind::UvaPadova, 23);
  save_cohort(cb, path_b);
  CHECK(cohort_to_string(load_cohort(path_b)) == cohort_to_string(cb));
  std::remove(path_b.c_str());

  CHECK_THROWS_AS(load_cohort(temp_path("vct_no_such_cohort.tsv")), IoError);
}

TEST_CASE("sampling exhaustion is reported") {
  RejectionCounts counts;
  sample_participant(ModelKind::Hovorka, 29, 1, &counts);
  REQUIRE(counts.total_attempts > 1); // first attempt was rejected
  CHECK_THROWS_AS(sample_participant(ModelKind::Hovorka, 29, 1, nullptr, 1),
                  ExhaustionError);
}

TEST_CASE("basal conversion respects each model's infusion units") {
  ParticipantRecord r;
  r.model_kind = ModelKind::Hovorka;
  r.basal_u_ss = 1000.0 / 60.0; // mU/min
  CHECK(basal_units_per_hour(r) == doctest::Approx(1.0).epsilon(1e-12));
  r.model_kind = ModelKind::UvaPadova;
  r.basal_u_ss = 100.0; // pmol/min
  CHECK(basal_units_per_hour(r) == doctest::Approx(1.0).epsilon(1e-12));
}
