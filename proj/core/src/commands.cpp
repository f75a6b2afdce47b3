#include "hecke/commands.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sstream>
#include <thread>

#include <openssl/evp.h>

#include "CLI11.hpp"

namespace hecke {

namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string sym_name(SymConvention c) {
  return c == SymConvention::orbit_sum ? "orbit_sum" : "full_s4_sum";
}

std::string omega_name(OmegaChoice c) {
  return c == OmegaChoice::calibrated ? "calibrated" : "ascending";
}

std::string form_name(RemarkForm f) { return f == RemarkForm::invert_p ? "invert_p" : "literal"; }

json base_report(const std::string& check, const Config& config) {
  return {{"check", check},
          {"ktable_sha1", git_blob_sha1(config.ktable)},
          {"config", {{"sym", sym_name(config.sym)}, {"omega", omega_name(config.omega)}}},
          {"results", json::array()}};
}

// Records one residual; the first nonzero one is kept whole in the report.
void add_result(json& report, const std::string& name, json params, const MultiPoly& residual,
                json extra = json::object()) {
  json entry = {{"name", name}, {"params", std::move(params)}, {"residual_zero", residual.is_zero()}};
  for (auto& [k, v] : extra.items()) entry[k] = v;
  if (!residual.is_zero() && !report.contains("first_failure"))
    report["first_failure"] = {{"name", name}, {"params", entry["params"]}, {"residual", to_json(residual)}};
  report["results"].push_back(std::move(entry));
}

void finish(CheckOutcome& out) {
  bool ok = true;
  for (const auto& r : out.report["results"]) ok = ok && r.at("residual_zero").get<bool>();
  out.passed = ok;
  out.report["passed"] = ok;
}

std::uint64_t parse_budget(const char* text) {
  char* end = nullptr;
  const double v = std::strtod(text, &end);
  if (end == text || *end != '\0' || v < 1) throw UsageError(std::string("bad budget: ") + text);
  return static_cast<std::uint64_t>(v);
}

// Genus-n numerator known without enumeration: P_4 from the table, P_3 by
// projection, P_1 = 1.
RationalFunction known_series(int genus, const KTable& table, SymConvention sym) {
  switch (genus) {
    case 4:
      return genus4_rational_function(table, sym);
    case 3:
      return siegel_project(genus4_rational_function(table, sym));
    case 1:
      return RationalFunction(MultiPoly(1), build_Q(1));
    default:
      throw UsageError("no stored numerator for genus " + std::to_string(genus) +
                       "; use `reconstruct --genus 2 --symbolic`");
  }
}

// Literal relation with p already numeric: substitute, then specialize p.
bool numeric_remark_holds(const MultiPoly& P, int genus, std::int64_t p) {
  const RemarkResult r = check_remark_relation(P, genus, RemarkForm::literal);
  return r.residual.specialize(Var::p, Coefficient(static_cast<long>(p))).is_zero();
}

}  // namespace

Config Config::from_environment() {
  Config c;
  if (const char* env = std::getenv("HECKE_ENUM_BUDGET")) c.budget = parse_budget(env);
  return c;
}

EnumerationOptions Config::enumeration() const {
  EnumerationOptions o;
  o.budget = budget;
  o.workers = workers;
  return o;
}

OmegaFamily Config::omega_family(int genus) const {
  return omega == OmegaChoice::calibrated ? OmegaFamily::calibrated(genus)
                                          : OmegaFamily::ascending(genus);
}

KTable Config::load_ktable() const { return KTable::load(ktable); }

std::string git_blob_sha1(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  const std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::string header = "blob " + std::to_string(content.size()) + '\0';

  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr);
  EVP_DigestUpdate(ctx, header.data(), header.size());
  EVP_DigestUpdate(ctx, content.data(), content.size());
  EVP_DigestFinal_ex(ctx, digest, &length);
  EVP_MD_CTX_free(ctx);

  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 0xf];
  }
  return hex;
}

CheckOutcome run_check(const std::string& name, const CheckParams& params, const Config& config) {
  const auto start = Clock::now();
  CheckOutcome out;
  out.report = base_report(name, config);
  out.timing = {{"check", name}, {"steps", json::array()}};
  const KTable table = config.load_ktable();
  const EnumerationOptions options = config.enumeration();

  if (name == "funceq") {
    const auto r = check_functional_equation(table, config.sym);
    for (int k = 0; k < kNumK; ++k)
      add_result(out.report, "K_" + std::to_string(14 - k) + " vs K_" + std::to_string(k),
                 {{"k", k}}, r.residuals[static_cast<std::size_t>(k)]);
  } else if (name == "remark") {
    const int genus = params.genus.value_or(4);
    MultiPoly P;
    if (genus == 2) {
      P = reconstruct_symbolic(2, InterpolationPlan{}, options, config.omega_family(2)).numerator;
    } else {
      P = known_series(genus, table, config.sym).numerator;
    }
    const auto r = check_remark_relation(P, genus, params.remark_form);
    add_result(out.report, "remark", {{"genus", genus}, {"form", form_name(params.remark_form)}},
               r.residual);
  } else if (name == "oracle") {
    const int genus = params.genus.value_or(4);
    const std::int64_t p = params.p.value_or(2);
    const int max_delta = params.max_delta.value_or(2);
    const SeriesPrefix lhs =
        expand(specialize_p(known_series(genus, table, config.sym), p), max_delta, genus);
    for (int d = 0; d <= max_delta; ++d) {
      const auto step = Clock::now();
      const ValuationCounts counts = diagonal_class_counts(genus, p, d, options);
      std::uint64_t total = 0;
      for (const auto& [k, c] : counts) total += c;
      const MultiPoly oracle = image_from_counts(genus, p, d, counts, config.omega_family(genus));
      add_result(out.report, "delta=" + std::to_string(d),
                 {{"genus", genus}, {"p", p}, {"delta", d}},
                 lhs.coefficients[static_cast<std::size_t>(d)] - oracle, {{"cosets", total}});
      out.timing["steps"].push_back({{"delta", d}, {"elapsed_ms", elapsed_ms(step)}});
    }
  } else if (name == "siegel") {
    const std::int64_t p = params.p.value_or(2);
    const int max_delta = params.max_delta.value_or(3);
    const auto projected = siegel_project(RationalFunction(MultiPoly(1), build_Q(4)));
    MultiPoly q_residual = projected.expanded_denominator();
    q_residual -= RationalFunction(MultiPoly(1), build_Q(3)).expanded_denominator();
    add_result(out.report, "Q4 at x4=0 vs Q3",
               {{"factors", static_cast<int>(projected.denominator_factors.size())}}, q_residual);
    if (projected.denominator_factors != build_Q(3))
      add_result(out.report, "Q4 factor list at x4=0", json::object(), MultiPoly(1));
    const Residuals r = verify_siegel(table, p, max_delta, options, config.sym);
    for (int d = 0; d <= max_delta; ++d)
      add_result(out.report, "delta=" + std::to_string(d), {{"genus", 3}, {"p", p}, {"delta", d}},
                 r.per_delta[static_cast<std::size_t>(d)]);
  } else if (name == "counts") {
    const int genus = params.genus.value_or(4);
    const std::int64_t p = params.p.value_or(2);
    const std::uint64_t count = count_cosets(genus, p, 1, options);
    std::uint64_t expected = 1;
    for (int i = 1; i <= genus; ++i) {
      std::uint64_t pi = 1;
      for (int j = 0; j < i; ++j) pi *= static_cast<std::uint64_t>(p);
      expected *= pi + 1;
    }
    MultiPoly diff(Coefficient(mpz_class(std::to_string(count))) -
                   Coefficient(mpz_class(std::to_string(expected))));
    add_result(out.report, "coset count", {{"genus", genus}, {"p", p}, {"delta", 1}}, diff,
               {{"count", count}, {"expected", expected}});
  } else {
    throw UsageError("unknown check '" + name + "' (funceq, remark, oracle, siegel, counts)");
  }
  finish(out);
  out.timing["elapsed_ms"] = elapsed_ms(start);
  return out;
}

CheckOutcome run_reconstruct(const ReconstructParams& params, const Config& config) {
  const auto start = Clock::now();
  const int genus = params.genus;
  if (genus < 1 || genus > 4) throw UsageError("genus must be in 1..4");
  const int degree = params.degree.value_or((1 << genus) - 2);
  CheckOutcome out;
  out.report = base_report("reconstruct", config);
  out.report["params"] = {{"genus", genus}, {"degree", degree}, {"symbolic", params.symbolic}};
  const EnumerationOptions options = config.enumeration();

  if (params.symbolic) {
    if (genus > 2) throw UsageError("symbolic reconstruction is limited to genus <= 2");
    InterpolationPlan plan = params.plan;
    plan.degree = degree;
    const SymbolicReconstruction rec =
        reconstruct_symbolic(genus, plan, options, config.omega_family(genus));
    out.report["numerator"] = to_json(rec.numerator);
    out.report["numerator_text"] = rec.numerator.to_string();
    json primes = json::array();
    for (std::size_t i = 0; i < rec.per_prime.size(); ++i) {
      const auto [p, numeric] = rec.per_prime[i];
      const bool consistent = rec.numerator.specialize(Var::p, Coefficient(static_cast<long>(p))) == numeric;
      primes.push_back({{"p", p}, {"series_depth", rec.depth[i].second}, {"matches_symbolic", consistent}});
      if (!consistent)
        add_result(out.report, "specialization", {{"p", p}}, MultiPoly(1));
    }
    out.report["primes"] = std::move(primes);
    for (RemarkForm form : {RemarkForm::invert_p, RemarkForm::literal}) {
      const auto r = check_remark_relation(rec.numerator, genus, form);
      if (form == RemarkForm::invert_p)
        add_result(out.report, "remark", {{"genus", genus}, {"form", form_name(form)}}, r.residual);
      else
        out.report["remark_literal_holds"] = r.passed;
    }
  } else {
    const std::int64_t p = params.p;
    int depth = params.max_delta.value_or(degree);
    if (!params.max_delta)
      while (depth < degree + 2 &&
             projected_coset_count(genus, p, depth + 1) <= static_cast<long double>(config.budget) / 5)
        ++depth;
    const SeriesPrefix prefix = oracle_prefix(genus, p, depth, options, config.omega_family(genus));
    const MultiPoly P = reconstruct_numerator(build_Q(genus), prefix, degree);
    out.report["params"]["p"] = p;
    out.report["params"]["series_depth"] = depth;
    out.report["numerator"] = to_json(P);
    out.report["numerator_text"] = P.to_string();
    MultiPoly remark_residual = numeric_remark_holds(P, genus, p) ? MultiPoly() : MultiPoly(1);
    add_result(out.report, "remark", {{"genus", genus}, {"form", "literal"}, {"p", p}},
               remark_residual);
  }
  finish(out);
  out.timing = {{"check", "reconstruct"}, {"elapsed_ms", elapsed_ms(start)}};
  return out;
}

json emit_json(int genus, const Config& config) {
  if (genus < 1 || genus > 4) throw UsageError("genus must be in 1..4");
  json out = {{"genus", genus}, {"ktable_sha1", git_blob_sha1(config.ktable)}};
  json q = json::array();
  for (const auto& f : build_Q(genus)) q.push_back(to_json(f));
  out["Q"] = std::move(q);
  if (genus == 4) {
    const KTable table = config.load_ktable();
    out["K"] = table.to_json()["entries"];
    out["P"] = to_json(build_P4(table, config.sym));
  } else if (genus == 3) {
    out["P"] = to_json(known_series(3, config.load_ktable(), config.sym).numerator);
  } else if (genus == 1) {
    // p-independent; one prime suffices
    const SeriesPrefix prefix = oracle_prefix(1, 2, 2, config.enumeration(), config.omega_family(1));
    out["P"] = to_json(reconstruct_numerator(build_Q(1), prefix, 0));
  } else {
    out["P"] = nullptr;
  }
  return out;
}

namespace {

std::string emit_text(int genus, const Config& config) {
  std::ostringstream os;
  os << "Q_" << genus << " =";
  for (const auto& f : build_Q(genus)) os << " (" << f << ")";
  os << '\n';
  if (genus == 4) {
    const KTable table = config.load_ktable();
    for (int k = 0; k < table.size(); ++k) {
      const SymPoly& s = table[k];
      os << "K_" << k << " = ";
      if (s.is_zero()) {
        os << "0\n";
        continue;
      }
      if (s.x0pow == 0 && s.ppow == 0 && s.terms.size() == 1 && !s.terms[0].partition) {
        os << (s.sign < 0 ? "-" : "") << s.terms[0].pcoeff << '\n';
        continue;
      }
      os << (s.sign < 0 ? "-" : "") << "x0^" << s.x0pow << " * p^" << s.ppow << " * (\n";
      for (const auto& t : s.terms)
        os << "    (" << t.pcoeff << ")"
           << (t.partition ? " sym_" + t.partition->label() : std::string()) << '\n';
      os << ")\n";
    }
  } else {
    os << "P_" << genus << " = ";
    const json e = emit_json(genus, config);
    os << (e["P"].is_null() ? std::string("(run reconstruct)") : poly_from_json(e["P"]).to_string())
       << '\n';
  }
  return os.str();
}

std::string emit_latex(int genus, const Config& config) {
  std::ostringstream os;
  os << "Q_" << genus << "(\\mathsf{X}) = ";
  for (const auto& f : build_Q(genus)) {
    std::string m;
    for (const auto& [e, c] : f.terms()) {
      if (e == Exponents{}) continue;
      for (int i = 0; i <= 4; ++i)
        if (e[static_cast<std::size_t>(x_var(i))]) m += "x_" + std::to_string(i);
    }
    os << "(1-" << m << "\\mathsf{X})";
  }
  os << "\n\n";
  if (genus == 4) os << to_latex(config.load_ktable());
  return os.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << content;
}

void write_outcome(const std::filesystem::path& dir, const std::string& stem,
                   const CheckOutcome& outcome) {
  write_file(dir / (stem + ".json"), outcome.report.dump(2) + "\n");
  write_file(dir / (stem + ".timing.json"), outcome.timing.dump(2) + "\n");
}

std::vector<std::int64_t> as_primes(const std::vector<long>& v) {
  return std::vector<std::int64_t>(v.begin(), v.end());
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Config config;
  try {
    config = Config::from_environment();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  CLI::App app{"Spherical images of local Hecke series: emit, verify, reconstruct", "hecke"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string out_dir;
  std::string sym = "orbit";
  std::string omega = "calibrated";
  std::string ktable = config.ktable.string();
  double budget = static_cast<double>(config.budget);
  app.add_option("--out", out_dir, "Directory for all output files (default hecke-out)");
  app.add_option("--workers", config.workers, "Enumeration worker threads (0 = all cores)");
  app.add_option("--budget", budget, "Cap on projected enumerated cosets");
  app.add_option("--sym", sym, "sym convention")->check(CLI::IsMember({"orbit", "full"}));
  app.add_option("--omega", omega, "omega normalization")
      ->check(CLI::IsMember({"calibrated", "ascending"}));
  app.add_option("--ktable", ktable, "K-table JSON");

  std::string format = "json";
  int emit_genus = 4;
  auto* emit_cmd = app.add_subcommand("emit", "Write Q and P for a genus");
  emit_cmd->add_option("--genus", emit_genus)->check(CLI::Range(1, 4));
  emit_cmd->add_option("--format", format)->check(CLI::IsMember({"json", "latex", "text"}));

  std::string check_name;
  CheckParams check;
  long check_p = 0;
  int check_genus = 0, check_delta = -1;
  std::string form = "invert-p";
  auto* verify_cmd = app.add_subcommand("verify", "Run one verification");
  verify_cmd->add_option("check", check_name, "funceq | remark | oracle | siegel | counts")
      ->required();
  verify_cmd->add_option("--p", check_p);
  verify_cmd->add_option("--genus", check_genus)->check(CLI::Range(1, 4));
  verify_cmd->add_option("--max-delta", check_delta)->check(CLI::NonNegativeNumber);
  verify_cmd->add_option("--form", form, "remark form")
      ->check(CLI::IsMember({"invert-p", "literal"}));

  ReconstructParams rec;
  std::vector<long> primes, check_primes;
  int rec_degree = -1, rec_delta = -1;
  long rec_p = 2;
  auto* rec_cmd = app.add_subcommand("reconstruct", "Rediscover the numerator from the oracle");
  rec_cmd->add_option("--genus", rec.genus)->check(CLI::Range(1, 4));
  rec_cmd->add_flag("--symbolic", rec.symbolic, "Interpolate in p over several primes");
  rec_cmd->add_option("--p", rec_p, "Prime for a numeric reconstruction");
  rec_cmd->add_option("--degree", rec_degree);
  rec_cmd->add_option("--max-delta", rec_delta);
  rec_cmd->add_option("--primes", primes, "Interpolation primes");
  rec_cmd->add_option("--check-primes", check_primes, "Extra primes that must agree");

  int coset_genus = 1, coset_delta = 1;
  long coset_p = 2;
  auto* cosets_cmd = app.add_subcommand("cosets", "Dump coset representatives, one per line");
  cosets_cmd->add_option("--genus", coset_genus)->check(CLI::Range(1, 4));
  cosets_cmd->add_option("--p", coset_p);
  cosets_cmd->add_option("--delta", coset_delta)->check(CLI::NonNegativeNumber);

  int class_genus = 1;
  long class_p = 2;
  auto* classes_cmd =
      app.add_subcommand("classes", "Spherical images of T(p), T_i(p^2) by double coset");
  classes_cmd->add_option("--genus", class_genus)->check(CLI::Range(1, 4));
  classes_cmd->add_option("--p", class_p);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n' << app.help();
    return kExitUsage;
  }

  try {
    if (budget < 1) throw UsageError("budget must be positive");
    config.budget = static_cast<std::uint64_t>(budget);
    config.sym = sym == "orbit" ? SymConvention::orbit_sum : SymConvention::full_s4_sum;
    config.omega = omega == "calibrated" ? OmegaChoice::calibrated : OmegaChoice::ascending;
    config.ktable = ktable;
    if (config.workers == 0) config.workers = std::max(1u, std::thread::hardware_concurrency());
    const std::filesystem::path dir(out_dir.empty() ? "hecke-out" : out_dir);

    if (emit_cmd->parsed()) {
      config.format = format == "json"    ? OutputFormat::json
                      : format == "latex" ? OutputFormat::latex
                                          : OutputFormat::text;
      const std::string stem = "genus" + std::to_string(emit_genus);
      std::filesystem::path path;
      switch (config.format) {
        case OutputFormat::json:
          path = dir / (stem + ".json");
          write_file(path, emit_json(emit_genus, config).dump(2) + "\n");
          break;
        case OutputFormat::latex:
          path = dir / (stem + ".tex");
          write_file(path, emit_latex(emit_genus, config));
          break;
        case OutputFormat::text:
          path = dir / (stem + ".txt");
          write_file(path, emit_text(emit_genus, config));
          break;
      }
      out << "wrote " << path.string() << '\n';
      return kExitOk;
    }

    if (verify_cmd->parsed()) {
      if (check_p) check.p = check_p;
      if (check_genus) check.genus = check_genus;
      if (check_delta >= 0) check.max_delta = check_delta;
      check.remark_form = form == "literal" ? RemarkForm::literal : RemarkForm::invert_p;
      const CheckOutcome outcome = run_check(check_name, check, config);
      write_outcome(dir, "verify-" + check_name, outcome);
      for (const auto& r : outcome.report["results"])
        out << (r["residual_zero"].get<bool>() ? "ok    " : "FAIL  ") << r["name"].get<std::string>()
            << (r.contains("cosets") ? " cosets=" + r["cosets"].dump() : "")
            << (r.contains("count") ? " count=" + r["count"].dump() : "") << '\n';
      out << "verify " << check_name << ": " << (outcome.passed ? "PASS" : "FAIL") << '\n';
      if (!outcome.passed) {
        const auto& f = outcome.report["first_failure"];
        err << "first failure: " << f["name"].get<std::string>() << ' ' << f["params"].dump() << ", "
            << f["residual"].size() << " residual terms (full residual in the report)\n";
      }
      return outcome.passed ? kExitOk : kExitFailed;
    }

    if (rec_cmd->parsed()) {
      rec.p = rec_p;
      if (rec_degree >= 0) rec.degree = rec_degree;
      if (rec_delta >= 0) rec.max_delta = rec_delta;
      if (!primes.empty()) rec.plan.fit_primes = as_primes(primes);
      if (rec_cmd->count("--check-primes")) rec.plan.check_primes = as_primes(check_primes);
      const CheckOutcome outcome = run_reconstruct(rec, config);
      write_outcome(dir, "reconstruct-genus" + std::to_string(rec.genus), outcome);
      out << "P_" << rec.genus << " = " << outcome.report["numerator_text"].get<std::string>()
          << '\n';
      out << "remark relation: " << (outcome.passed ? "holds" : "FAILS") << '\n';
      return outcome.passed ? kExitOk : kExitFailed;
    }

    if (cosets_cmd->parsed()) {
      std::ofstream file;
      std::ostream* sink = &out;
      if (!out_dir.empty()) {
        std::filesystem::create_directories(dir);
        file.open(dir / "cosets.txt");
        sink = &file;
      }
      for_each_coset(coset_genus, coset_p, coset_delta, config.enumeration(),
                     [sink](const CosetRep& rep) { *sink << rep.dump_line() << '\n'; });
      return kExitOk;
    }

    if (classes_cmd->parsed()) {
      const auto images = spherical_generators(class_genus, class_p, config.enumeration(),
                                               config.omega_family(class_genus), &err);
      json report = json::array();
      for (const auto& c : images) {
        out << c.name << " " << c.chain.label() << " count=" << c.count << " : " << c.image << '\n';
        report.push_back({{"name", c.name},
                          {"class", c.chain.label()},
                          {"delta", c.delta},
                          {"count", c.count},
                          {"image", to_json(c.image)}});
      }
      if (!out_dir.empty()) write_file(dir / "classes.json", report.dump(2) + "\n");
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const BudgetExceeded& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const SeriesError& e) {
    err << "verification failure: " << e.what() << '\n';
    return kExitFailed;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace hecke
