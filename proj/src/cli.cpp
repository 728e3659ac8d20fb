#include "tropica/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tropica/amoeba.hpp"
#include "tropica/dequantify.hpp"
#include "tropica/filters.hpp"
#include "tropica/io.hpp"
#include "tropica/nesting.hpp"
#include "tropica/probe.hpp"
#include "tropica/selftest.hpp"
#include "tropica/thermo.hpp"
#include "tropica/ultrametric.hpp"

namespace tropica {

namespace {

using nlohmann::json;

struct GlobalOpts {
  std::string mode = "float";
  std::uint64_t seed = 1;
  std::string tie_tol;  // empty means the per-mode default
  std::string out = "-";
  std::string format;  // empty means the per-subcommand default
};

struct Assertion {
  std::string name;
  bool pass = false;
};

// ---- deterministic emission ----

void emit(const GlobalOpts& g, const std::string& content) {
  if (g.out == "-") {
    std::cout << content;
    std::cout.flush();
  } else {
    write_text_file(g.out, content);
  }
}

std::string make_digest(const std::vector<std::string>& chunks) {
  std::string buf;
  for (const std::string& c : chunks) {
    buf += c;
    buf += '\x1e';
  }
  return fnv1a_hex(buf);
}

// Emits the run report, then escalates any failed assertion: the output is
// always written before the nonzero exit.
void finish(const GlobalOpts& g, const std::string& sub, const std::string& digest,
            JsonValue output, const std::vector<Assertion>& asserts, const std::string& csv,
            const std::string& default_format) {
  const std::string fmt = g.format.empty() ? default_format : g.format;
  if (fmt == "json") {
    JsonValue root = JsonValue::object();
    JsonValue arr = JsonValue::array();
    for (const Assertion& a : asserts) {
      JsonValue one = JsonValue::object();
      one.set("name", JsonValue::str(a.name));
      one.set("pass", JsonValue::boolean(a.pass));
      arr.push(std::move(one));
    }
    root.set("assertions", std::move(arr));
    root.set("input_digest", JsonValue::str(digest));
    root.set("output", std::move(output));
    root.set("subcommand", JsonValue::str(sub));
    root.set("version", JsonValue::integer(1));
    emit(g, root.dump());
  } else {
    emit(g, csv);
  }
  std::string failed;
  for (const Assertion& a : asserts)
    if (!a.pass) failed += (failed.empty() ? "" : "; ") + a.name;
  if (!failed.empty()) throw InvariantViolation(failed);
}

// ---- scalar rendering ----

template <class S>
JsonValue scalar_json(const S& v);
template <>
JsonValue scalar_json<double>(const double& v) {
  return JsonValue::real(v);
}
template <>
JsonValue scalar_json<Rat>(const Rat& v) {
  return JsonValue::str(v.to_string());
}

template <class S>
std::string scalar_str(const S& v);
template <>
std::string scalar_str<double>(const double& v) {
  return format_double(v);
}
template <>
std::string scalar_str<Rat>(const Rat& v) {
  return v.to_string();
}

template <class S>
S parse_tie_tol(const std::string& text) {
  if (text.empty()) return ScalarOps<S>::default_tie_tol();
  const S v = ScalarOps<S>::parse(text);
  if (!ScalarOps<S>::is_finite(v) || v < ScalarOps<S>::from_int(0))
    throw ParseError("--tie-tol must be finite and nonnegative");
  return v;
}

// ---- strict JSON input ----

json parse_json_text(const std::string& text, const std::string& where) {
  json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw ParseError(where + " is not valid JSON");
  return j;
}

void require_schema(const json& j, const std::string& where, const std::vector<std::string>& required,
                    const std::vector<std::string>& optional) {
  if (!j.is_object()) throw ParseError(where + " must be a JSON object");
  for (const std::string& k : required)
    if (!j.contains(k)) throw ParseError(where + " is missing required key \"" + k + "\"");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    const bool known = std::find(required.begin(), required.end(), k) != required.end() ||
                       std::find(optional.begin(), optional.end(), k) != optional.end();
    if (!known) throw ParseError(where + " has unknown key \"" + k + "\"");
  }
  const json& v = j.at("version");
  if (!v.is_number_integer() || v.get<long long>() != 1)
    throw ParseError(where + " needs \"version\": 1");
}

template <class S>
S json_scalar(const json& v, const std::string& where);

template <>
double json_scalar<double>(const json& v, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return ScalarOps<double>::parse(v.get<std::string>());
  throw ParseError(where + " must be a number or a numeric string");
}

template <>
Rat json_scalar<Rat>(const json& v, const std::string& where) {
  if (v.is_number_integer()) return Rat(v.get<long long>());
  if (v.is_string()) return Rat::parse(v.get<std::string>());
  if (v.is_number()) throw ParseError(where + ": exact mode needs integers or \"p/q\" strings");
  throw ParseError(where + " must be an integer or a rational string");
}

// --spectrum takes an inline JSON array or a path to a one-key document.
json load_spectrum_json(const std::string& arg, std::string& raw) {
  if (!arg.empty() && arg.front() == '[') {
    raw = arg;
    return parse_json_text(arg, "inline spectrum");
  }
  raw = read_text_file(arg);
  json j = parse_json_text(raw, arg);
  require_schema(j, arg, {"version", "spectrum"}, {});
  return j.at("spectrum");
}

template <class S>
std::vector<S> spectrum_values(const json& arr) {
  if (!arr.is_array() || arr.empty()) throw ParseError("spectrum must be a nonempty JSON array");
  std::vector<S> out;
  out.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i)
    out.push_back(json_scalar<S>(arr[i], "spectrum[" + std::to_string(i) + "]"));
  return out;
}

// ---- CSV input ----

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<std::string> table_lines(const std::string& text, const std::string& where) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      if (!cur.empty() && cur.back() == '\r') cur.pop_back();
      lines.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) lines.push_back(cur);
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw ParseError(where + " is empty");
  return lines;
}

// ---- subcommand option bags ----

struct NestOpts {
  std::string spectrum;
  std::string type = "A";
};

struct ProbeOpts {
  std::string spectrum;
  int orders = 3;
};

struct UltraOpts {
  std::string matrix;
  std::string form = "max";
};

struct RoundtripOpts {
  int points = 6;
  int trials = 20;
};

struct FiltersOpts {
  std::string family;
  std::string measure;
};

struct ThermoOpts {
  std::string model;
};

struct DequantifyOpts {
  std::string spectrum;
  int alpha = 1;
  std::string schedule = "pow2:12";
};

struct AmoebaOpts {
  std::string model;
  int k = 1;
  std::string grid;
};

// ---- nest ----

template <class S>
void run_nest_t(const GlobalOpts& g, const NestOpts& o) {
  std::string raw;
  const json arr = load_spectrum_json(o.spectrum, raw);
  const std::vector<S> s = spectrum_values<S>(arr);
  const S tol = parse_tie_tol<S>(g.tie_tol);
  const NestType type = o.type == "B" ? NestType::B : NestType::A;
  const NestingForm<S> nf = nest(s, type, tol);

  std::vector<Assertion> asserts;
  bool partition_ok = true;
  try {
    validate_nesting(nf);
  } catch (const InputError&) {
    partition_ok = false;
  }
  asserts.push_back({"levels partition the index set with strictly monotone values", partition_ok});

  if constexpr (ScalarOps<S>::exact) {
    bool small_integers = true;
    Rat direct(0);
    for (const Rat& v : s) {
      if (v.den() != 1 || v.num() > 40 || v.num() < -40) {
        small_integers = false;
        break;
      }
      direct += pow(Rat(2), (long long)v.num());
    }
    if (small_integers)
      asserts.push_back({"the nested product matches the direct base-2 sum",
                         reconstruct_exact(nf, Rat(2)) == direct});
  } else {
    double direct = 0;
    for (double v : s) direct += std::exp(v);
    const double rec = reconstruct(nf);
    asserts.push_back({"the nested product matches the direct exponential sum",
                       std::abs(rec - direct) <= 1e-12 * direct});
  }

  if (tol == ScalarOps<S>::from_int(0)) {
    const NestingForm<S> other = nest(s, type == NestType::A ? NestType::B : NestType::A, tol);
    const NestingForm<S> rev = reverse_nesting(nf);
    bool same = other.levels.size() == rev.levels.size();
    for (std::size_t l = 0; same && l < rev.levels.size(); ++l)
      same = other.levels[l].indices == rev.levels[l].indices &&
             other.levels[l].mu == rev.levels[l].mu && other.levels[l].nu == rev.levels[l].nu;
    asserts.push_back({"the opposite strip order is the exact reversal", same});
  }

  JsonValue out = JsonValue::object();
  JsonValue levels = JsonValue::array();
  std::string csv = csv_row({"level", "mu", "nu", "indices"});
  for (std::size_t l = 0; l < nf.levels.size(); ++l) {
    const NestLevel<S>& lvl = nf.levels[l];
    JsonValue jl = JsonValue::object();
    JsonValue idx = JsonValue::array();
    std::string joined;
    for (int i : lvl.indices) {
      idx.push(JsonValue::integer(i));
      joined += (joined.empty() ? "" : " ") + std::to_string(i);
    }
    jl.set("indices", std::move(idx));
    jl.set("mu", scalar_json<S>(lvl.mu));
    jl.set("nu", JsonValue::integer(lvl.nu));
    levels.push(std::move(jl));
    csv += csv_row({std::to_string(l), scalar_str<S>(lvl.mu), std::to_string(lvl.nu), joined});
  }
  out.set("levels", std::move(levels));
  out.set("n", JsonValue::integer(nf.n));
  out.set("type", JsonValue::str(o.type));

  finish(g, "nest", make_digest({"nest", g.mode, g.tie_tol, o.type, raw}), std::move(out), asserts,
         csv, "json");
}

void run_nest(const GlobalOpts& g, const NestOpts& o) {
  if (g.mode == "exact")
    run_nest_t<Rat>(g, o);
  else
    run_nest_t<double>(g, o);
}

// ---- probe ----

void run_probe(const GlobalOpts& g, const ProbeOpts& o) {
  if (g.mode == "exact")
    throw Unsupported("the probe differentiates a transcendental function; run it in float mode");
  std::string raw;
  const json arr = load_spectrum_json(o.spectrum, raw);
  const std::vector<double> s = spectrum_values<double>(arr);
  const TaylorProbeReport rep = taylor_probe(s, o.orders);

  JsonValue out = JsonValue::object();
  out.set("gap", JsonValue::real(rep.gap));
  out.set("kappa0", JsonValue::real(rep.kappa0));
  out.set("lambda0", JsonValue::integer(rep.lambda0));
  JsonValue orders = JsonValue::array();
  std::string csv = csv_row({"order", "estimate", "target", "deviation", "residual"});
  for (const ProbeOrderResult& r : rep.orders) {
    JsonValue jo = JsonValue::object();
    jo.set("deviation", JsonValue::real(r.deviation));
    jo.set("estimate", JsonValue::real(r.estimate));
    jo.set("order", JsonValue::integer(r.order));
    jo.set("residual", JsonValue::real(r.residual));
    jo.set("target", JsonValue::real(r.target));
    orders.push(std::move(jo));
    csv += csv_row({std::to_string(r.order), format_double(r.estimate), format_double(r.target),
                    format_double(r.deviation), format_double(r.residual)});
  }
  out.set("orders", std::move(orders));

  finish(g, "probe", make_digest({"probe", g.mode, std::to_string(o.orders), raw}), std::move(out),
         {}, csv, "csv");
}

// ---- ultra ----

template <class S>
UltrametricMatrix<S> parse_matrix(const std::string& text, Mode form, const std::string& where) {
  const std::vector<std::string> lines = table_lines(text, where);
  const std::vector<std::string> labels = split_fields(lines[0]);
  const int n = int(labels.size());
  if (n < 2) throw ParseError(where + " needs a header row with at least two point labels");
  if (int(lines.size()) != n + 1)
    throw ParseError(where + " needs exactly " + std::to_string(n) + " distance rows after the header");
  UltrametricMatrix<S> m;
  m.points = labels;
  m.form = form;
  m.d = Mat<S>::Constant(n, n, ScalarOps<S>::from_int(0));
  for (int i = 0; i < n; ++i) {
    const std::vector<std::string> row = split_fields(lines[std::size_t(i) + 1]);
    if (int(row.size()) != n)
      throw ParseError(where + " row " + std::to_string(i + 1) + " has " +
                       std::to_string(row.size()) + " fields, expected " + std::to_string(n));
    for (int j = 0; j < n; ++j) m.d(i, j) = ScalarOps<S>::parse(row[std::size_t(j)]);
  }
  return m;
}

template <class S>
void run_ultra_t(const GlobalOpts& g, const UltraOpts& o) {
  const std::string raw = read_text_file(o.matrix);
  const Mode form = o.form == "min" ? Mode::Min : Mode::Max;
  const UltrametricMatrix<S> m = parse_matrix<S>(raw, form, o.matrix);
  const VerifyReport<S> rep = verify_ultrametric(m);

  std::vector<Assertion> asserts;
  asserts.push_back({form == Mode::Max
                         ? "every triangle obeys d(x,z) <= max(d(x,y), d(y,z))"
                         : "every triangle obeys d(x,z) >= min(d(x,y), d(y,z))",
                     rep.triangle_ok});
  asserts.push_back({"off-diagonal distances are strictly positive", rep.positivity_ok});
  asserts.push_back({"the triangle sweep and the reduction route agree", rep.checks_agree});

  JsonValue out = JsonValue::object();
  out.set("checks_agree", JsonValue::boolean(rep.checks_agree));
  out.set("form", JsonValue::str(o.form));
  out.set("points", JsonValue::integer(m.size()));
  out.set("positivity_ok", JsonValue::boolean(rep.positivity_ok));
  out.set("reduction_ok", JsonValue::boolean(rep.reduction_ok));
  out.set("triangle_ok", JsonValue::boolean(rep.triangle_ok));
  out.set("valid", JsonValue::boolean(rep.valid));
  std::string wx, wy, wz, wv;
  if (rep.worst.has_value()) {
    JsonValue w = JsonValue::object();
    wx = m.points[std::size_t(rep.worst->x)];
    wy = m.points[std::size_t(rep.worst->y)];
    wz = m.points[std::size_t(rep.worst->z)];
    wv = scalar_str<S>(rep.worst_violation);
    w.set("violation", scalar_json<S>(rep.worst_violation));
    w.set("x", JsonValue::str(wx));
    w.set("y", JsonValue::str(wy));
    w.set("z", JsonValue::str(wz));
    out.set("worst", std::move(w));
  } else {
    out.set("worst", JsonValue::null());
  }

  std::string csv = csv_row({"valid", "triangle_ok", "reduction_ok", "checks_agree",
                             "positivity_ok", "worst_x", "worst_y", "worst_z", "worst_violation"});
  csv += csv_row({rep.valid ? "1" : "0", rep.triangle_ok ? "1" : "0", rep.reduction_ok ? "1" : "0",
                  rep.checks_agree ? "1" : "0", rep.positivity_ok ? "1" : "0", wx, wy, wz, wv});

  finish(g, "ultra", make_digest({"ultra", g.mode, o.form, raw}), std::move(out), asserts, csv,
         "json");
}

void run_ultra(const GlobalOpts& g, const UltraOpts& o) {
  if (g.mode == "exact")
    run_ultra_t<Rat>(g, o);
  else
    run_ultra_t<double>(g, o);
}

// ---- roundtrip ----

template <class S>
void run_roundtrip_t(const GlobalOpts& g, const RoundtripOpts& o) {
  JsonValue trials = JsonValue::array();
  std::string csv = csv_row({"trial", "seed", "points", "equal", "max_deviation"});
  bool all_equal = true;
  for (int t = 0; t < o.trials; ++t) {
    const std::uint64_t seed = g.seed + std::uint64_t(t);
    const UltrametricMatrix<S> m = random_tree_ultrametric<S>(o.points, seed);
    const RoundtripReport<S> r = roundtrip_check(m);
    all_equal = all_equal && r.equal;
    JsonValue jt = JsonValue::object();
    jt.set("equal", JsonValue::boolean(r.equal));
    jt.set("max_deviation", scalar_json<S>(r.max_deviation));
    jt.set("points", JsonValue::integer(o.points));
    jt.set("seed", JsonValue::integer((long long)seed));
    jt.set("trial", JsonValue::integer(t));
    trials.push(std::move(jt));
    csv += csv_row({std::to_string(t), std::to_string(seed), std::to_string(o.points),
                    r.equal ? "1" : "0", scalar_str<S>(r.max_deviation)});
  }
  JsonValue out = JsonValue::object();
  out.set("all_equal", JsonValue::boolean(all_equal));
  out.set("trials", std::move(trials));

  const std::vector<Assertion> asserts{
      {"distances rebuilt from the ball ideal equal the seed matrix", all_equal}};
  finish(g, "roundtrip",
         make_digest({"roundtrip", g.mode, std::to_string(o.points), std::to_string(o.trials),
                      std::to_string(g.seed)}),
         std::move(out), asserts, csv, "csv");
}

void run_roundtrip(const GlobalOpts& g, const RoundtripOpts& o) {
  if (g.mode == "exact")
    run_roundtrip_t<Rat>(g, o);
  else
    run_roundtrip_t<double>(g, o);
}

// ---- filters ----

std::string kind_name(FamilyKind k) {
  switch (k) {
    case FamilyKind::Filter: return "filter";
    case FamilyKind::Ultrafilter: return "ultrafilter";
    case FamilyKind::Ideal: return "ideal";
    default: return "neither";
  }
}

void run_filters(const GlobalOpts& g, const FiltersOpts& o) {
  const std::string raw = read_text_file(o.family);
  const json j = parse_json_text(raw, o.family);
  require_schema(j, o.family, {"version", "ground", "members"}, {});
  const json& jg = j.at("ground");
  if (!jg.is_number_integer()) throw ParseError(o.family + ": \"ground\" must be an integer");
  const int ground = int(jg.get<long long>());
  const json& jm = j.at("members");
  if (!jm.is_array()) throw ParseError(o.family + ": \"members\" must be an array of index arrays");
  std::vector<std::uint64_t> masks;
  masks.reserve(jm.size());
  for (std::size_t i = 0; i < jm.size(); ++i) {
    const json& row = jm[i];
    if (!row.is_array())
      throw ParseError(o.family + ": members[" + std::to_string(i) + "] must be an index array");
    std::vector<int> idx;
    for (const json& v : row) {
      if (!v.is_number_integer())
        throw ParseError(o.family + ": members[" + std::to_string(i) + "] holds a non-integer");
      idx.push_back(int(v.get<long long>()));
    }
    masks.push_back(subset_from_indices(ground, idx).bits);
  }
  const SubsetFamily fam = make_family(ground, std::move(masks));
  const FilterCertificate cert = classify(fam);

  const std::vector<Assertion> asserts{
      {"duality is an involution on set families", dual(dual(fam)) == fam}};

  std::string measure_str;
  if (!o.measure.empty()) {
    std::vector<int> idx;
    for (const std::string& f : split_fields(o.measure)) {
      try {
        idx.push_back(std::stoi(f));
      } catch (const std::exception&) {
        throw ParseError("--measure wants comma-separated indices, got \"" + f + "\"");
      }
    }
    const Tri t = filter_measure(fam, subset_from_indices(ground, idx));
    measure_str = t == Tri::One ? "1" : t == Tri::Zero ? "0" : "undefined";
  }

  JsonValue out = JsonValue::object();
  out.set("ground", JsonValue::integer(ground));
  out.set("kind", JsonValue::str(kind_name(cert.kind)));
  std::string gen_joined;
  if (cert.principal_generator.has_value()) {
    JsonValue gen = JsonValue::array();
    for (int i : indices_of(*cert.principal_generator)) {
      gen.push(JsonValue::integer(i));
      gen_joined += (gen_joined.empty() ? "" : " ") + std::to_string(i);
    }
    out.set("principal_generator", std::move(gen));
  } else {
    out.set("principal_generator", JsonValue::null());
  }
  out.set("proper", JsonValue::boolean(cert.proper));
  out.set("size", JsonValue::integer((long long)fam.size()));
  if (!o.measure.empty()) out.set("measure", JsonValue::str(measure_str));

  std::string csv = csv_row({"kind", "proper", "size", "generator", "measure"});
  csv += csv_row({kind_name(cert.kind), cert.proper ? "1" : "0",
                  std::to_string((long long)fam.size()), gen_joined, measure_str});

  finish(g, "filters", make_digest({"filters", g.mode, o.measure, raw}), std::move(out), asserts,
         csv, "json");
}

// ---- thermo ----

template <class S>
void run_thermo_t(const GlobalOpts& g, const ThermoOpts& o) {
  const std::string raw = read_text_file(o.model);
  const json j = parse_json_text(raw, o.model);
  require_schema(j, o.model, {"version", "systems"}, {"kB"});
  const json& js = j.at("systems");
  if (!js.is_array() || js.empty())
    throw ParseError(o.model + ": \"systems\" must be a nonempty array");

  std::vector<MicroSystem<S>> systems;
  std::vector<std::string> labels;
  int labeled = 0;
  for (std::size_t i = 0; i < js.size(); ++i) {
    const std::string where = o.model + ": systems[" + std::to_string(i) + "]";
    const json& sys = js[i];
    if (!sys.is_object()) throw ParseError(where + " must be an object");
    for (auto it = sys.begin(); it != sys.end(); ++it) {
      const std::string& k = it.key();
      if (k != "E" && k != "S" && k != "T" && k != "label")
        throw ParseError(where + " has unknown key \"" + k + "\"");
    }
    for (const char* k : {"E", "S", "T"})
      if (!sys.contains(k)) throw ParseError(where + " is missing required key \"" + std::string(k) + "\"");
    MicroSystem<S> m;
    m.energy = json_scalar<S>(sys.at("E"), where + ".E");
    m.entropy = json_scalar<S>(sys.at("S"), where + ".S");
    m.temperature = json_scalar<S>(sys.at("T"), where + ".T");
    systems.push_back(m);
    if (sys.contains("label")) {
      if (!sys.at("label").is_string()) throw ParseError(where + ".label must be a string");
      labels.push_back(sys.at("label").get<std::string>());
      ++labeled;
    }
  }
  if (labeled != 0 && labeled != int(js.size()))
    throw ParseError(o.model + ": label all systems or none");
  const S k_B = j.contains("kB") ? json_scalar<S>(j.at("kB"), o.model + ".kB")
                                 : ScalarOps<S>::from_int(0);
  const S tol = parse_tie_tol<S>(g.tie_tol);

  const Ensemble<S> e = make_ensemble(std::move(systems), std::move(labels));
  const std::vector<S> obj = tropical_objectives(e);
  const TropicalValueB<S> val = tropical_free_energy_B(e, tol);
  const DualityReport<S> dual_rep = duality_identity(e, tol);

  bool common_t = true, positive_t = true;
  for (const MicroSystem<S>& m : e.systems) {
    common_t = common_t && m.temperature == e.systems.front().temperature;
    positive_t = positive_t && ScalarOps<S>::from_int(0) < m.temperature;
  }
  std::optional<TropicalWeights<S>> weights;
  if (common_t && positive_t) weights = tropical_weights(e, k_B, tol);

  const Ensemble<S> dd = ab_dual(ab_dual(e));
  bool involution = true;
  for (std::size_t i = 0; i < e.systems.size(); ++i) {
    auto close = [](const S& a, const S& b) {
      if constexpr (ScalarOps<S>::exact) {
        return a == b;
      } else {
        return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a));
      }
    };
    involution = involution && close(e.systems[i].energy, dd.systems[i].energy) &&
                 close(e.systems[i].entropy, dd.systems[i].entropy) &&
                 close(e.systems[i].temperature, dd.systems[i].temperature);
  }

  const std::vector<Assertion> asserts{
      {"the B-side minimum equals the negated dual A-side maximum", dual_rep.equal},
      {"swapping energy with entropy and inverting temperature is an involution", involution}};

  JsonValue out = JsonValue::object();
  JsonValue jd = JsonValue::object();
  JsonValue jmin = JsonValue::array();
  for (int i : dual_rep.argmin) jmin.push(JsonValue::integer(i));
  JsonValue jmax = JsonValue::array();
  for (int i : dual_rep.argmax) jmax.push(JsonValue::integer(i));
  jd.set("argmax", std::move(jmax));
  jd.set("argmin", std::move(jmin));
  jd.set("deviation", scalar_json<S>(dual_rep.deviation));
  jd.set("equal", JsonValue::boolean(dual_rep.equal));
  jd.set("lhs", scalar_json<S>(dual_rep.lhs));
  jd.set("rhs", scalar_json<S>(dual_rep.rhs));
  out.set("duality", std::move(jd));
  out.set("value", scalar_json<S>(val.value));
  JsonValue jarg = JsonValue::array();
  for (int i : val.argmin) jarg.push(JsonValue::integer(i));
  out.set("value_argmin", std::move(jarg));

  JsonValue jsys = JsonValue::array();
  std::string csv = csv_row({"label", "energy", "entropy", "temperature", "objective", "weight_W",
                             "weight_w", "argmin"});
  for (std::size_t i = 0; i < e.systems.size(); ++i) {
    const MicroSystem<S>& m = e.systems[i];
    const bool in_argmin =
        std::find(val.argmin.begin(), val.argmin.end(), int(i) + 1) != val.argmin.end();
    JsonValue one = JsonValue::object();
    one.set("argmin", JsonValue::boolean(in_argmin));
    one.set("energy", scalar_json<S>(m.energy));
    one.set("entropy", scalar_json<S>(m.entropy));
    one.set("label", JsonValue::str(e.labels[i]));
    one.set("objective", scalar_json<S>(obj[i]));
    one.set("temperature", scalar_json<S>(m.temperature));
    std::string sW, sw;
    if (weights.has_value()) {
      one.set("weight_W", scalar_json<S>(weights->W[i]));
      one.set("weight_w", scalar_json<S>(weights->w[i]));
      sW = scalar_str<S>(weights->W[i]);
      sw = scalar_str<S>(weights->w[i]);
    } else {
      one.set("weight_W", JsonValue::null());
      one.set("weight_w", JsonValue::null());
    }
    jsys.push(std::move(one));
    csv += csv_row({e.labels[i], scalar_str<S>(m.energy), scalar_str<S>(m.entropy),
                    scalar_str<S>(m.temperature), scalar_str<S>(obj[i]), sW, sw,
                    in_argmin ? "1" : "0"});
  }
  out.set("systems", std::move(jsys));

  finish(g, "thermo", make_digest({"thermo", g.mode, g.tie_tol, raw}), std::move(out), asserts,
         csv, "csv");
}

void run_thermo(const GlobalOpts& g, const ThermoOpts& o) {
  if (g.mode == "exact")
    run_thermo_t<Rat>(g, o);
  else
    run_thermo_t<double>(g, o);
}

// ---- dequantify ----

CopySchedule parse_schedule(const std::string& text) {
  const std::string pow2 = "pow2:";
  try {
    if (text.rfind(pow2, 0) == 0) return pow2_schedule(std::stoi(text.substr(pow2.size())));
    std::vector<long long> n;
    for (const std::string& f : split_fields(text)) n.push_back(std::stoll(f));
    return make_schedule(std::move(n));
  } catch (const InputError&) {
    throw;
  } catch (const std::exception&) {
    throw ParseError("--schedule wants pow2:<levels> or comma-separated copy counts, got \"" +
                     text + "\"");
  }
}

void run_dequantify(const GlobalOpts& g, const DequantifyOpts& o) {
  if (g.mode == "exact")
    throw Unsupported("dequantification evaluates Gibbs exponentials; run it in float mode");
  std::string raw;
  const json arr = load_spectrum_json(o.spectrum, raw);
  const std::vector<double> s = spectrum_values<double>(arr);
  const CopySchedule sched = parse_schedule(o.schedule);
  const DequantifyReport rep = dequantified_weight(s, o.alpha, sched);

  JsonValue out = JsonValue::object();
  out.set("converged", JsonValue::boolean(rep.converged));
  out.set("dominant", JsonValue::boolean(rep.dominant));
  out.set("fitted_rate", rep.rate_defined ? JsonValue::real(rep.fitted_rate) : JsonValue::null());
  out.set("limit", JsonValue::real(rep.limit));
  out.set("rate_defined", JsonValue::boolean(rep.rate_defined));
  JsonValue table = JsonValue::array();
  std::string csv = csv_row({"N", "kB", "w", "gap"});
  for (const DequantifyRow& row : rep.table) {
    JsonValue jr = JsonValue::object();
    jr.set("N", JsonValue::integer(row.copies));
    jr.set("gap", JsonValue::real(row.gap));
    jr.set("kB", JsonValue::real(row.k_B));
    jr.set("w", JsonValue::real(row.w));
    table.push(std::move(jr));
    csv += csv_row({std::to_string(row.copies), format_double(row.k_B), format_double(row.w),
                    format_double(row.gap)});
  }
  out.set("table", std::move(table));

  finish(g, "dequantify",
         make_digest({"dequantify", g.mode, std::to_string(o.alpha), o.schedule, raw}),
         std::move(out), {}, csv, "csv");
}

// ---- amoeba ----

void run_amoeba(const GlobalOpts& g, const AmoebaOpts& o) {
  if (g.mode == "exact")
    throw Unsupported("the instability scan evaluates exponentials; run it in float mode");
  const std::string raw_model = read_text_file(o.model);
  const json j = parse_json_text(raw_model, o.model);
  require_schema(j, o.model, {"version", "n"}, {"unguarded"});
  const json& jn = j.at("n");
  if (!jn.is_number_integer()) throw ParseError(o.model + ": \"n\" must be an integer");
  const int n = int(jn.get<long long>());
  bool unguarded = false;
  if (j.contains("unguarded")) {
    if (!j.at("unguarded").is_boolean()) throw ParseError(o.model + ": \"unguarded\" must be a boolean");
    unguarded = j.at("unguarded").get<bool>();
  }

  const std::string raw_grid = read_text_file(o.grid);
  const std::vector<std::string> lines = table_lines(raw_grid, o.grid);
  const int header_n = int(split_fields(lines[0]).size());
  if (header_n != n)
    throw ParseError(o.grid + " header has " + std::to_string(header_n) + " columns, the model says " +
                     std::to_string(n));
  std::vector<std::vector<double>> grid;
  grid.reserve(lines.size() - 1);
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const std::vector<std::string> row = split_fields(lines[r]);
    if (int(row.size()) != n)
      throw ParseError(o.grid + " row " + std::to_string(r) + " has " + std::to_string(row.size()) +
                       " fields, expected " + std::to_string(n));
    std::vector<double> vals;
    vals.reserve(row.size());
    for (const std::string& f : row) vals.push_back(ScalarOps<double>::parse(f));
    grid.push_back(std::move(vals));
  }

  const AmoebaModel model = make_amoeba_model(n, o.k, std::move(grid), unguarded);
  const ScanResult sr = instability_scan(model);

  const std::vector<Assertion> asserts{
      {"flagged points trace through the patterns of their unique maximizer",
       sr.trace_failures.empty()}};

  JsonValue out = JsonValue::object();
  JsonValue rows = JsonValue::array();
  std::string csv = csv_row({"point", "family_size", "max_cardinality", "flagged", "alpha"});
  for (const ScanRow& r : sr.rows) {
    JsonValue jr = JsonValue::object();
    jr.set("alpha", r.alpha.has_value() ? JsonValue::integer(*r.alpha) : JsonValue::null());
    jr.set("family_size", JsonValue::integer(r.family_size));
    jr.set("flagged", JsonValue::boolean(r.flagged));
    jr.set("max_cardinality", JsonValue::integer(r.max_cardinality));
    jr.set("point", JsonValue::integer(r.point));
    jr.set("trace_ok", JsonValue::boolean(r.trace_ok));
    rows.push(std::move(jr));
    csv += csv_row({std::to_string(r.point), std::to_string(r.family_size),
                    std::to_string(r.max_cardinality), r.flagged ? "1" : "0",
                    r.alpha.has_value() ? std::to_string(*r.alpha) : ""});
  }
  out.set("rows", std::move(rows));
  JsonValue fails = JsonValue::array();
  for (int p : sr.trace_failures) fails.push(JsonValue::integer(p));
  out.set("trace_failures", std::move(fails));

  finish(g, "amoeba", make_digest({"amoeba", g.mode, std::to_string(o.k), raw_model, raw_grid}),
         std::move(out), asserts, csv, "csv");
}

// ---- selftest ----

void run_selftest_cmd(const GlobalOpts& g) {
  std::ostringstream oss;
  const int code = run_selftest(oss);
  emit(g, oss.str());
  if (code != 0)
    throw InvariantViolation("reference fixture replay failed; see the lines marked FAIL");
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Tropical spectrum toolkit: level decompositions, ultrametrics, set-family "
               "classification, and copy statistics."};
  app.fallthrough();
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--mode", g.mode, "scalar arithmetic: float doubles or exact rationals")
      ->check(CLI::IsMember({"float", "exact"}))
      ->capture_default_str();
  app.add_option("--seed", g.seed, "base seed for randomized subcommands")->capture_default_str();
  app.add_option("--tie-tol", g.tie_tol,
                 "tie tolerance for minimizer sets (default 1e-9 float, 0 exact)");
  app.add_option("--out", g.out, "output path, - for stdout")->capture_default_str();
  app.add_option("--format", g.format, "output format (default json or csv per subcommand)")
      ->check(CLI::IsMember({"csv", "json"}));

  NestOpts nest_o;
  CLI::App* nest_cmd = app.add_subcommand("nest", "strip a spectrum into strictly monotone levels");
  nest_cmd->add_option("--spectrum", nest_o.spectrum,
                       "inline JSON array or path to {\"version\":1,\"spectrum\":[...]}")
      ->required();
  nest_cmd->add_option("--type", nest_o.type, "A strips maxima first, B strips minima first")
      ->check(CLI::IsMember({"A", "B"}))
      ->capture_default_str();
  nest_cmd->callback([&] { run_nest(g, nest_o); });

  ProbeOpts probe_o;
  CLI::App* probe_cmd =
      app.add_subcommand("probe", "finite-difference expansion of the free energy at k = 0+");
  probe_cmd->add_option("--spectrum", probe_o.spectrum,
                        "inline JSON array or path to {\"version\":1,\"spectrum\":[...]}")
      ->required();
  probe_cmd->add_option("--orders", probe_o.orders, "highest probed order")
      ->check(CLI::Range(2, 4))
      ->capture_default_str();
  probe_cmd->callback([&] { run_probe(g, probe_o); });

  UltraOpts ultra_o;
  CLI::App* ultra_cmd = app.add_subcommand("ultra", "verify a distance matrix as an ultrametric");
  ultra_cmd->add_option("--matrix", ultra_o.matrix,
                        "CSV path: a header row of point labels, then one distance row per point")
      ->required();
  ultra_cmd->add_option("--form", ultra_o.form, "max or min triangle form")
      ->check(CLI::IsMember({"max", "min"}))
      ->capture_default_str();
  ultra_cmd->callback([&] { run_ultra(g, ultra_o); });

  RoundtripOpts rt_o;
  CLI::App* rt_cmd = app.add_subcommand(
      "roundtrip", "rebuild random tree ultrametrics from their ball ideals and compare");
  rt_cmd->add_option("--points", rt_o.points, "points per sampled space")
      ->check(CLI::Range(2, 12))
      ->capture_default_str();
  rt_cmd->add_option("--trials", rt_o.trials, "number of sampled spaces")
      ->check(CLI::Range(1, 100000))
      ->capture_default_str();
  rt_cmd->callback([&] { run_roundtrip(g, rt_o); });

  FiltersOpts filters_o;
  CLI::App* filters_cmd =
      app.add_subcommand("filters", "classify a set family as filter, ultrafilter, ideal, or neither");
  filters_cmd->add_option("--family", filters_o.family,
                          "JSON path: {\"version\":1,\"ground\":n,\"members\":[[indices],...]}")
      ->required();
  filters_cmd->add_option("--measure", filters_o.measure,
                          "comma-separated indices: report the zero-one measure of this subset");
  filters_cmd->callback([&] { run_filters(g, filters_o); });

  ThermoOpts thermo_o;
  CLI::App* thermo_cmd =
      app.add_subcommand("thermo", "tropical free energy, duality, and weights of an ensemble");
  thermo_cmd->add_option(
      "--model", thermo_o.model,
      "JSON path: {\"version\":1,\"systems\":[{\"E\":..,\"S\":..,\"T\":..,\"label\":?}],\"kB\":?}")
      ->required();
  thermo_cmd->callback([&] { run_thermo(g, thermo_o); });

  DequantifyOpts deq_o;
  CLI::App* deq_cmd = app.add_subcommand(
      "dequantify", "Gibbs weight of a state under copy pressure along a schedule");
  deq_cmd->add_option("--spectrum", deq_o.spectrum,
                      "inline JSON array or path to {\"version\":1,\"spectrum\":[...]}")
      ->required();
  deq_cmd->add_option("--alpha", deq_o.alpha, "1-based state index")
      ->required()
      ->check(CLI::PositiveNumber);
  deq_cmd->add_option("--schedule", deq_o.schedule,
                      "pow2:<levels> or comma-separated increasing copy counts")
      ->capture_default_str();
  deq_cmd->callback([&] { run_dequantify(g, deq_o); });

  AmoebaOpts amoeba_o;
  CLI::App* amoeba_cmd = app.add_subcommand(
      "amoeba", "scan tabulated spectra for saturated negative-mass pattern families");
  amoeba_cmd->add_option("--model", amoeba_o.model,
                         "JSON path: {\"version\":1,\"n\":systems,\"unguarded\":?}")
      ->required();
  amoeba_cmd->add_option("--k", amoeba_o.k, "pattern cardinality, constrained by 2k < n + 1")
      ->required()
      ->check(CLI::PositiveNumber);
  amoeba_cmd->add_option("--grid", amoeba_o.grid,
                         "CSV path: a header row of n labels, then one f row per grid point")
      ->required();
  amoeba_cmd->callback([&] { run_amoeba(g, amoeba_o); });

  CLI::App* selftest_cmd =
      app.add_subcommand("selftest", "replay the pinned reference computations");
  selftest_cmd->callback([&] { run_selftest_cmd(g); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violated: " << e.what() << "\n";
    return 2;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace tropica
