#include "vct/population.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "vct/errors.hpp"
#include "vct/units.hpp"

namespace vct {

namespace {

DistributionSpec normal(double mean, double sd) {
  return {DistKind::Normal, mean, sd, DistTransform::None};
}
DistributionSpec lognormal(double log_mean, double log_sd,
                           DistTransform t = DistTransform::None) {
  return {DistKind::LogNormal, log_mean, log_sd, t};
}
DistributionSpec uniform(double lo, double hi) {
  return {DistKind::Uniform, lo, hi - lo, DistTransform::None};
}
DistributionSpec fixed(double v) {
  return {DistKind::Fixed, v, 0.0, DistTransform::None};
}
DistributionSpec reciprocal_normal(double mean, double sd) {
  return {DistKind::Normal, mean, sd, DistTransform::Reciprocal};
}

} // namespace

const std::vector<ParamSpec>& hovorka_param_table() {
  static const std::vector<ParamSpec> table = [] {
    std::vector<ParamSpec> t;
    t.push_back({"tau_S", "min", reciprocal_normal(0.018, 0.0045), false, 1.0 / 0.018});
    t.push_back({"V_I", "L/kg", normal(0.12, 0.012), true, 0.0});
    t.push_back({"k_e", "1/min", normal(0.14, 0.035), false, 0.14});
    t.push_back({"k_a1", "1/min", normal(0.0055, 0.0056), false, 0.0055});
    t.push_back({"k_a2", "1/min", normal(0.0683, 0.0507), false, 0.0683});
    t.push_back({"k_a3", "1/min", normal(0.0304, 0.0235), false, 0.0304});
    t.push_back({"S_IT", "1e-4/min per mU/L", normal(51.2, 32.09), false, 0.0});
    t.push_back({"S_ID", "1e-4/min per mU/L", normal(8.2, 7.84), false, 0.0});
    t.push_back({"S_IE", "1e-4 per mU/L", normal(520.0, 306.2), false, 0.0});
    t.push_back({"A_G", "-", uniform(0.7, 1.2), false, 0.0});
    t.push_back({"tau_D", "min", lognormal(-3.689, 0.25, DistTransform::Reciprocal),
                 false, std::exp(3.689)});
    t.push_back({"k_12", "1/min", normal(0.0649, 0.0282), false, 0.0649});
    t.push_back({"EGP_0", "mmol/kg/min", normal(0.0161, 0.0039), true, 0.0});
    t.push_back({"F_01", "mmol/kg/min", normal(0.0097, 0.0022), true, 0.0});
    t.push_back({"V_G", "L/kg", lognormal(std::log(0.15), 0.23), true, 0.0});
    t.push_back({"tau_IG", "min", fixed(15.0), false, 0.0});
    t.push_back({"BW", "kg", uniform(65.0, 95.0), false, 0.0});
    return t;
  }();
  return table;
}

const std::vector<ParamSpec>& uvapadova_param_table() {
  static const std::vector<ParamSpec> table = [] {
    std::vector<ParamSpec> t;
    t.push_back({"BW", "kg", normal(70.492, 12.7502), false, 0.0});
    t.push_back({"k_1", "1/min", normal(0.081, 0.023), false, 0.0});
    t.push_back({"k_2", "1/min", normal(0.137, 0.053), false, 0.0});
    t.push_back({"V_g", "dL/kg", normal(1.87, 0.102), false, 0.0});
    t.push_back({"G_b", "mg/kg", normal(147.41, 8.939), false, 0.0});
    t.push_back({"HE_b", "-", fixed(0.6), false, 0.0});
    t.push_back({"CL", "L/min", normal(1.021, 0.308), false, 0.0});
    t.push_back({"m_1", "1/min", normal(0.2109, 0.1362), false, 0.0});
    t.push_back({"V_i", "L/kg", normal(0.0646, 0.0175), false, 0.0});
    t.push_back({"I_b", "pmol/L", normal(92.747, 19.6618), false, 0.0});
    t.push_back({"tau_D", "min", lognormal(-3.689, 0.25, DistTransform::Reciprocal),
                 false, 0.0});
    t.push_back({"A_G", "-", uniform(0.7, 1.2), false, 0.0});
    t.push_back({"EGP_b", "mg/kg/min", normal(2.504, 0.391), false, 0.0});
    t.push_back({"k_p2", "1/min", normal(0.005, 0.004), false, 0.0});
    t.push_back({"k_p3", "mg/kg/min per pmol/L", normal(0.0106, 0.0068), false, 0.0});
    t.push_back({"k_i", "1/min", normal(0.0069, 0.0027), false, 0.0});
    t.push_back({"F_cns", "mg/kg/min", fixed(1.0), false, 0.0});
    t.push_back({"V_mx", "mg/kg/min per pmol/L", normal(0.081, 0.033), false, 0.0});
    t.push_back({"K_m0", "mg/kg", normal(224.281, 12.264), false, 0.0});
    t.push_back({"p_2U", "1/min", normal(0.0246, 0.012), false, 0.0});
    t.push_back({"k_e1", "1/min", fixed(0.0005), false, 0.0});
    t.push_back({"k_e2", "mg/kg", fixed(339.0), false, 0.0});
    t.push_back({"k_a1", "1/min", normal(0.0016, 0.0005), false, 0.0});
    t.push_back({"k_a2", "1/min", normal(0.0149, 0.0052), false, 0.0});
    t.push_back({"k_d", "1/min", normal(0.0161, 0.0017), false, 0.0});
    t.push_back({"k_sc", "1/min", normal(0.1033, 0.0376), false, 0.0});
    return t;
  }();
  return table;
}

const std::vector<ParamSpec>& param_table(ModelKind m) {
  return m == ModelKind::Hovorka ? hovorka_param_table() : uvapadova_param_table();
}

std::string to_string(ModelKind m) {
  return m == ModelKind::Hovorka ? "hovorka" : "uvapadova";
}

ModelKind model_kind_from_string(const std::string& s) {
  if (s == "hovorka") return ModelKind::Hovorka;
  if (s == "uvapadova") return ModelKind::UvaPadova;
  throw ConfigError("unknown model kind: " + s);
}

std::string to_string(Sex s) { return s == Sex::Female ? "female" : "male"; }

double sample_parameter(const DistributionSpec& spec, NoiseStream& rng) {
  const auto base = [&]() -> double {
    switch (spec.kind) {
      case DistKind::Normal: return spec.location + spec.scale * rng.normal();
      case DistKind::LogNormal: return std::exp(spec.location + spec.scale * rng.normal());
      case DistKind::Uniform: return spec.location + spec.scale * rng.uniform01();
      case DistKind::Fixed: return spec.location;
    }
    return spec.location;
  };
  if (spec.transform == DistTransform::None) return base();
  double v = base();
  while (!(v > 0.0)) v = base();
  return 1.0 / v;
}

std::optional<double> normal_deviation(const DistributionSpec& spec, double value) {
  if (spec.scale == 0.0) return std::nullopt;
  if (spec.kind == DistKind::Uniform || spec.kind == DistKind::Fixed)
    return std::nullopt;
  double base = value;
  if (spec.transform == DistTransform::Reciprocal) base = 1.0 / value;
  if (spec.kind == DistKind::LogNormal) base = std::log(base);
  return (base - spec.location) / spec.scale;
}

double mean_parameter(const DistributionSpec& spec) {
  double base = 0.0;
  switch (spec.kind) {
    case DistKind::Normal: base = spec.location; break;
    case DistKind::LogNormal: base = std::exp(spec.location); break;
    case DistKind::Uniform: base = spec.location + 0.5 * spec.scale; break;
    case DistKind::Fixed: base = spec.location; break;
  }
  return spec.transform == DistTransform::Reciprocal ? 1.0 / base : base;
}

std::vector<double> mean_draws(ModelKind m) {
  const auto& table = param_table(m);
  std::vector<double> out;
  out.reserve(table.size());
  for (const auto& ps : table) out.push_back(mean_parameter(ps.dist));
  return out;
}

HovorkaParams build_hovorka_params(const std::vector<double>& d) {
  if (d.size() != hovorka_param_table().size())
    throw std::invalid_argument("hovorka draw vector has wrong length");
  const double bw = d[16];
  HovorkaParams p{};
  p.tau_S = d[0];
  p.V_I = d[1] * bw;
  p.k_e = d[2];
  p.k_a1 = d[3];
  p.k_a2 = d[4];
  p.k_a3 = d[5];
  p.S_IT = d[6];
  p.S_ID = d[7];
  p.S_IE = d[8];
  p.A_G = d[9];
  p.tau_D = d[10];
  p.k_12 = d[11];
  p.EGP_0 = d[12] * bw;
  p.F_01 = d[13] * bw;
  p.V_G = d[14] * bw;
  p.tau_IG = d[15];
  p.BW = bw;
  return p;
}

UvaPadovaParams build_uvapadova_params(const std::vector<double>& d) {
  if (d.size() != uvapadova_param_table().size())
    throw std::invalid_argument("uvapadova draw vector has wrong length");
  UvaPadovaParams p{};
  p.BW = d[0];
  p.k_1 = d[1];
  p.k_2 = d[2];
  p.V_g = d[3];
  p.G_b = d[4];
  p.HE_b = d[5];
  p.CL = d[6];
  p.m_1 = d[7];
  p.V_i = d[8];
  p.I_b = d[9];
  p.tau_D = d[10];
  p.A_G = d[11];
  p.EGP_b = d[12];
  p.k_p2 = d[13];
  p.k_p3 = d[14];
  p.k_i = d[15];
  p.F_cns = d[16];
  p.V_mx = d[17];
  p.K_m0 = d[18];
  p.p_2U = d[19];
  p.k_e1 = d[20];
  p.k_e2 = d[21];
  p.k_a1 = d[22];
  p.k_a2 = d[23];
  p.k_d = d[24];
  p.k_sc = d[25];
  return p;
}

RejectionRule screen_draws(ModelKind m, const std::vector<double>& draws,
                           double* u_ss_out) {
  const auto& table = param_table(m);
  if (draws.size() != table.size())
    throw std::invalid_argument("draw vector has wrong length");

  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto dev = normal_deviation(table[i].dist, draws[i]);
    if (dev && std::abs(*dev) > 1.0) return RejectionRule::OneSd;
  }

  if (m == ModelKind::Hovorka) {
    const double span = std::pow(10.0, kTimeConstantSpanDecades);
    for (std::size_t i = 0; i < table.size(); ++i) {
      const double ref = table[i].tc_reference;
      if (ref <= 0.0) continue;
      const double v = draws[i];
      if (!(v >= ref / span) || !(v <= ref * span)) return RejectionRule::TimeConstant;
    }
  }

  try {
    double u_per_hour = 0.0;
    if (m == ModelKind::Hovorka) {
      const auto p = build_hovorka_params(draws);
      const auto ss = hovorka_steady_state(p, kScreeningTargetMmolPerL);
      u_per_hour = mU_per_min_to_units_per_hour(ss.u_ss);
      if (u_ss_out) *u_ss_out = ss.u_ss;
    } else {
      const auto p = build_uvapadova_params(draws);
      const auto ss = uvapadova_steady_state(
          p, mmol_per_l_to_mg_per_dl(kScreeningTargetMmolPerL));
      u_per_hour = pmol_per_min_to_units_per_hour(ss.u_ss);
      if (u_ss_out) *u_ss_out = ss.u_ss;
    }
    if (u_per_hour < kMinBasalUnitsPerHour) return RejectionRule::Basal;
  } catch (const SimulationError&) {
    return RejectionRule::Basal;
  }
  return RejectionRule::None;
}

double basal_units_per_hour(const ParticipantRecord& r) {
  return r.model_kind == ModelKind::Hovorka
             ? mU_per_min_to_units_per_hour(r.basal_u_ss)
             : pmol_per_min_to_units_per_hour(r.basal_u_ss);
}

namespace {

const char* const kFemaleNames[] = {
    "Astrid", "Birgitta", "Clara",  "Dagny",  "Elin",   "Freja",
    "Greta",  "Hanna",    "Ingrid", "Johanna", "Karin",  "Linnea",
    "Maja",   "Nora",     "Oda",    "Petra",
};
const char* const kMaleNames[] = {
    "Anders", "Bjorn",  "Casper", "Didrik", "Emil",   "Fredrik",
    "Gustav", "Henrik", "Ivar",   "Jonas",  "Kasper", "Lars",
    "Mikkel", "Nils",   "Oskar",  "Per",
};
const char* const kFamilyNames[] = {
    "Andersen", "Bergstrom", "Carlsen",  "Dahl",      "Eriksen",  "Fisker",
    "Gundersen", "Holm",     "Iversen",  "Jensen",    "Karlsson", "Lindqvist",
    "Moller",   "Nilsen",    "Olsen",    "Pedersen",  "Ravn",     "Sorensen",
    "Thomsen",  "Ulriksen",  "Vinter",   "Westergaard",
};
const char* const kPlaces[] = {
    "Aarhus",    "Bergen",   "Copenhagen", "Drammen", "Esbjerg", "Falun",
    "Gothenburg", "Helsinki", "Jonkoping",  "Kolding", "Lund",    "Malmo",
    "Odense",    "Reykjavik", "Stavanger",  "Tampere", "Trondheim", "Uppsala",
};

// days <-> civil date (proleptic Gregorian), days counted from 1970-01-01
std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  y = static_cast<int>(yoe) + static_cast<int>(era) * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp + (mp < 10 ? 3 : -9);
  y += m <= 2;
}

std::string synth_date_of_birth(NoiseStream& rng) {
  // uniform age between 18 and 70 years relative to 2024-01-01
  const std::int64_t ref = days_from_civil(2024, 1, 1);
  const std::int64_t lo = static_cast<std::int64_t>(18 * 365.25);
  const std::int64_t hi = static_cast<std::int64_t>(70 * 365.25);
  const std::int64_t age_days = lo + static_cast<std::int64_t>(rng.below(hi - lo + 1));
  int y;
  unsigned m, d;
  civil_from_days(ref - age_days, y, m, d);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", y, m, d);
  return buf;
}

template <std::size_t N>
const char* pick(const char* const (&arr)[N], NoiseStream& rng) {
  return arr[rng.below(N)];
}

void dress_demographics(ParticipantRecord& r, NoiseStream& rng) {
  r.sex = (rng.next_u64() & 1) ? Sex::Male : Sex::Female;
  r.given_name = r.sex == Sex::Female ? pick(kFemaleNames, rng) : pick(kMaleNames, rng);
  r.family_name = pick(kFamilyNames, rng);
  r.place_of_birth = pick(kPlaces, rng);
  r.date_of_birth = synth_date_of_birth(rng);
  r.height_cm = std::clamp(rng.normal(170.0, 10.0), 145.0, 200.0);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

} // namespace

ParticipantRecord sample_participant(ModelKind m, std::uint64_t master_seed,
                                     std::uint64_t participant_id,
                                     RejectionCounts* counts,
                                     std::uint64_t max_attempts) {
  NoiseStream rng(master_seed, participant_id, StreamPurpose::Sampling);
  const auto& table = param_table(m);
  std::vector<double> draws(table.size());
  for (std::uint64_t attempt = 0; attempt < max_attempts; ++attempt) {
    if (counts) ++counts->total_attempts;
    for (std::size_t i = 0; i < table.size(); ++i)
      draws[i] = sample_parameter(table[i].dist, rng);
    double u_ss = 0.0;
    switch (screen_draws(m, draws, &u_ss)) {
      case RejectionRule::OneSd:
        if (counts) ++counts->one_sd;
        continue;
      case RejectionRule::TimeConstant:
        if (counts) ++counts->time_constant;
        continue;
      case RejectionRule::Basal:
        if (counts) ++counts->basal;
        continue;
      case RejectionRule::None:
        break;
    }
    ParticipantRecord r;
    r.id = participant_id;
    r.model_kind = m;
    r.draws = draws;
    r.basal_u_ss = u_ss;
    r.body_weight_kg = m == ModelKind::Hovorka ? draws[16] : draws[0];
    dress_demographics(r, rng);
    return r;
  }
  throw ExhaustionError("no acceptable parameter set within " +
                        std::to_string(max_attempts) + " attempts");
}

Cohort generate_cohort(std::size_t n, ModelKind m, std::uint64_t master_seed,
                       RejectionCounts* counts) {
  Cohort c;
  c.model_kind = m;
  c.master_seed = master_seed;
  c.participants.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    c.participants.push_back(sample_participant(m, master_seed, i + 1, counts));
  return c;
}

std::string cohort_to_string(const Cohort& c) {
  const auto& table = param_table(c.model_kind);
  std::ostringstream out;
  out << "# vct-cohort v1\n";
  out << "# model = " << to_string(c.model_kind) << "\n";
  out << "# master_seed = " << c.master_seed << "\n";
  out << "# n = " << c.participants.size() << "\n";
  for (const auto& ps : table)
    out << "# param " << ps.name << "\t" << ps.unit << "\n";
  out << "id\tgiven_name\tfamily_name\tdate_of_birth\tplace_of_birth\tsex\t"
         "height_cm\tbody_weight_kg";
  for (const auto& ps : table) out << "\t" << ps.name;
  out << "\tbasal_u_ss\n";
  for (const auto& r : c.participants) {
    out << r.id << "\t" << r.given_name << "\t" << r.family_name << "\t"
        << r.date_of_birth << "\t" << r.place_of_birth << "\t" << to_string(r.sex)
        << "\t" << format_double(r.height_cm) << "\t"
        << format_double(r.body_weight_kg);
    for (double v : r.draws) out << "\t" << format_double(v);
    out << "\t" << format_double(r.basal_u_ss) << "\n";
  }
  return out.str();
}

void save_cohort(const Cohort& c, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw IoError("cannot write " + tmp);
    f << cohort_to_string(c);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw IoError("cannot rename " + tmp + " to " + path);
}

Cohort load_cohort(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot read " + path);
  Cohort c;
  bool have_model = false;
  std::string line;
  std::vector<std::string> param_names;
  bool header_seen = false;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ls(line.substr(1));
      std::string word;
      ls >> word;
      if (word == "model") {
        std::string eq, v;
        ls >> eq >> v;
        c.model_kind = model_kind_from_string(v);
        have_model = true;
      } else if (word == "master_seed") {
        std::string eq;
        std::uint64_t v;
        ls >> eq >> v;
        c.master_seed = v;
      } else if (word == "param") {
        std::string name;
        ls >> name;
        param_names.push_back(name);
      }
      continue;
    }
    if (!header_seen) { // column-name row
      header_seen = true;
      continue;
    }
    if (!have_model) throw IoError("cohort file lacks a model header");
    const auto& table = param_table(c.model_kind);
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, '\t')) fields.push_back(field);
    const std::size_t expect = 8 + table.size() + 1;
    if (fields.size() != expect)
      throw IoError("cohort row has " + std::to_string(fields.size()) +
                    " fields, expected " + std::to_string(expect));
    ParticipantRecord r;
    r.model_kind = c.model_kind;
    r.id = std::stoull(fields[0]);
    r.given_name = fields[1];
    r.family_name = fields[2];
    r.date_of_birth = fields[3];
    r.place_of_birth = fields[4];
    r.sex = fields[5] == "male" ? Sex::Male : Sex::Female;
    r.height_cm = std::strtod(fields[6].c_str(), nullptr);
    r.body_weight_kg = std::strtod(fields[7].c_str(), nullptr);
    r.draws.resize(table.size());
    for (std::size_t i = 0; i < table.size(); ++i)
      r.draws[i] = std::strtod(fields[8 + i].c_str(), nullptr);
    r.basal_u_ss = std::strtod(fields[8 + table.size()].c_str(), nullptr);
    c.participants.push_back(std::move(r));
  }
  if (!have_model) throw IoError("cohort file lacks a model header");
  const auto& table = param_table(c.model_kind);
  if (param_names.size() != table.size())
    throw IoError("cohort file parameter list does not match the model");
  for (std::size_t i = 0; i < table.size(); ++i)
    if (param_names[i] != table[i].name)
      throw IoError("cohort file parameter order mismatch at " + param_names[i]);
  return c;
}

} // namespace vct
