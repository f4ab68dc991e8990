#include "pntlab/report.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

#include "pntlab/arith_sieve.hpp"
#include "pntlab/entropy_lab.hpp"
#include "pntlab/error.hpp"
#include "pntlab/good_primes.hpp"
#include "pntlab/hilbert_sampling.hpp"
#include "pntlab/parallel.hpp"
#include "pntlab/pnt_chain.hpp"
#include "pntlab/selberg_scales.hpp"

namespace pntlab {

namespace {

using json = nlohmann::ordered_json;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty())
    throw InvalidArgument(what + ": '" + text + "' is not a number");
  return v;
}

std::uint64_t parse_u64(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    if (!text.empty() && text[0] != '-') v = std::stoull(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty())
    throw InvalidArgument(what + ": '" + text + "' is not a non-negative integer");
  return v;
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json goodness_json(const GoodnessReport& g) {
  return {{"p", g.p}, {"badness", g.badness}, {"is_good", g.is_good},
          {"N", g.N}, {"epsilon", g.epsilon}};
}

json triple_json(const TripleCertificate& c) {
  return {{"p", c.p},
          {"p1", c.p1},
          {"p2", c.p2},
          {"ratio", c.ratio},
          {"deviation", c.deviation},
          {"k", c.k},
          {"k_adj", c.k_adj},
          {"certified", c.certified},
          {"goodness", json::array({goodness_json(c.good_p), goodness_json(c.good_p1),
                                    goodness_json(c.good_p2)})}};
}

json diagnostics_json(const TripleSearchDiagnostics& d) {
  return {{"k0", d.k0},
          {"kmax", d.kmax},
          {"records", d.records},
          {"adjacent_pairs", d.adjacent_pairs},
          {"primes_examined", d.primes_examined},
          {"semiprimes_examined", d.semiprimes_examined},
          {"floor_rejections", d.floor_rejections},
          {"full_classifications", d.full_classifications},
          {"min_badness_seen", d.min_badness_seen},
          {"min_floor_bound", d.min_floor_bound}};
}

json chain_json(const ChainReport& r) {
  json stages = json::object();
  for (const auto& s : r.stages) stages[s.label] = s.value;
  return {{"N", r.N},          {"epsilon", r.epsilon},
          {"K", r.K},          {"bound", r.K * r.epsilon},
          {"ell", r.ell},      {"triangle_slack", r.triangle_slack},
          {"stages", stages},  {"max_stage", r.max_stage()},
          {"triple", triple_json(r.triple)}};
}

struct Options {
  std::string kind = "mobius";
  std::uint64_t limit = 0;
  double eps = 0.1;
  std::uint64_t pmax = 0;
  std::int64_t k0 = 0;
  std::int64_t kmax = 0;
  std::size_t window = 3;
  std::uint64_t shift = 1;
  std::string primes = "2,3,5,7,11,13";
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  std::string out;
  std::string cache;
  std::string format = "json";
  unsigned threads = default_threads();
  std::string config;
  std::uint64_t budget = kDefaultOutcomeBudget;
  bool allow_uncertified = false;
};

class Session {
 public:
  explicit Session(const Options& o, const std::function<bool(const char*)>& given)
      : opt_(o), given_(given) {}

  json parameters = json::object();
  json results = json::object();
  std::map<std::string, std::string> checksums;
  std::vector<std::string> warnings;
  std::string csv;  // set by tabular commands
  int exit_code = 0;

  const Options& opt() const { return opt_; }
  bool given(const char* flag) const { return given_(flag); }

  std::uint64_t limit() {
    if (!given("--limit")) throw InvalidArgument("--limit is required");
    if (opt_.limit == 0) throw InvalidArgument("--limit must be >= 1");
    parameters["limit"] = opt_.limit;
    return opt_.limit;
  }
  double eps() {
    validate_epsilon(opt_.eps);
    parameters["eps"] = opt_.eps;
    return opt_.eps;
  }

  ArithTable table(TableKind kind, std::uint64_t limit) {
    SieveOptions so;
    so.threads = opt_.threads;
    ArithTable t = cached_table(kind, limit, opt_.cache, so);
    checksums[std::string(to_string(kind)) + "_" + std::to_string(limit)] =
        checksum_hex(table_checksum(t));
    return t;
  }

  std::vector<std::uint64_t> prime_list() {
    std::vector<std::uint64_t> out;
    std::stringstream ss(opt_.primes);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      const auto p = parse_u64(item, "--primes");
      if (!is_prime(p)) throw InvalidArgument("--primes: " + item + " is not prime");
      out.push_back(p);
    }
    if (!std::is_sorted(out.begin(), out.end()))
      throw InvalidArgument("--primes must be ascending");
    parameters["primes"] = opt_.primes;
    return out;
  }

 private:
  const Options& opt_;
  std::function<bool(const char*)> given_;
};

void cmd_sieve(Session& s) {
  const TableKind kind = parse_table_kind(s.opt().kind);
  if (kind == TableKind::custom) throw InvalidArgument("cannot sieve a custom table");
  s.parameters["kind"] = s.opt().kind;
  const auto N = s.limit();
  const ArithTable t = s.table(kind, N);
  const PrefixSums ps = prefix_sums(t);
  s.results["kind"] = std::string(to_string(kind));
  s.results["limit"] = N;
  s.results["checksum"] = checksum_hex(table_checksum(t));
  s.results["sum"] = ps.cumulative[N];
  if (kind == TableKind::mobius) {
    s.results["mertens"] = ps.mertens_at(N);
    s.results["mertens_ratio"] = std::abs(static_cast<double>(ps.mertens_at(N))) / N;
  }
  if (kind == TableKind::mangoldt) s.results["psi_ratio"] = ps.cumulative[N] / N;
}

void cmd_convolve(Session& s) {
  const auto N = s.limit();
  const ArithTable mu = s.table(TableKind::mobius, N);
  const ArithTable lg = s.table(TableKind::log, N);
  const ArithTable lam = s.table(TableKind::mangoldt, N);
  const ArithTable conv = dirichlet_convolve(mu, lg);
  double worst = 0.0;
  std::uint64_t where = 1;
  for (std::uint64_t n = 1; n <= N; ++n) {
    const double d = std::abs(lam[n] - conv[n]);
    if (d > worst) {
      worst = d;
      where = n;
    }
  }
  s.results["max_inversion_error"] = worst;
  s.results["worst_n"] = where;
  s.results["identity_residual"] = mu_log_identity_residual(mu, lam);
}

void cmd_tk(Session& s) {
  const auto N = s.limit();
  const std::uint64_t pmax = s.given("--pmax") ? s.opt().pmax : 1000;
  const std::size_t trials = s.given("--trials") ? s.opt().trials : 10000;
  s.parameters["pmax"] = pmax;
  s.parameters["trials"] = trials;
  s.parameters["seed"] = s.opt().seed;
  if (pmax < 2) throw InvalidArgument("--pmax must be >= 2");
  if (pmax > N) throw InvalidArgument("--pmax must not exceed --limit");
  const ArithTable mu = s.table(TableKind::mobius, N);
  const auto S = primes_in_range(2, pmax);
  const TkResult tk = tk_weighted_sum(mu, N, S);
  for (const auto& w : tk.warnings) s.warnings.push_back(w);
  s.results["tk"] = {{"value", tk.value},
                     {"trivial_bound", tk.trivial_bound},
                     {"crude_bound", tk_crude_bound(N, S)},
                     {"share_of_trivial", tk.trivial_bound > 0 ? tk.value / tk.trivial_bound : 0.0},
                     {"primes", S.size()}};
  const BhmAudit a = bhm_audit(trials, s.opt().seed);
  s.results["bhm"] = {{"trials", a.trials},
                      {"seed", a.seed},
                      {"max_excess", a.max_excess},
                      {"failures", a.failures}};
}

void cmd_goodprimes(Session& s) {
  const auto N = s.limit();
  const double eps = s.eps();
  const std::uint64_t pmax = s.given("--pmax") ? s.opt().pmax : 100;
  s.parameters["pmax"] = pmax;
  const ArithTable mu = s.table(TableKind::mobius, N);
  const auto summary = bad_reciprocal_sum(mu, pmax, N, eps, s.opt().threads);
  s.results["bad_reciprocal_sum"] = summary.sum;
  s.results["total_reciprocal"] = summary.total_reciprocal;
  s.results["weighted_badness"] = summary.weighted_badness;
  s.results["bad"] = summary.bad;
  json reports = json::array();
  for (const auto& r : summary.reports) reports.push_back(goodness_json(r));
  s.results["reports"] = reports;
  s.csv = goodness_csv(summary.reports);
}

void cmd_selberg(Session& s) {
  const auto N = s.limit();
  if (N < 3) throw InvalidArgument("--limit must be >= 3");
  const ArithTable l2 = s.table(TableKind::lambda2, N);
  const double ratio = selberg_ratio(l2, N);
  s.results["N"] = N;
  s.results["ratio"] = ratio;
  s.results["deviation"] = std::abs(ratio - 1.0);
  json decades = json::array();
  for (std::uint64_t x = 1000; x <= N; x *= 10) {
    const double r = selberg_ratio(l2, x);
    decades.push_back({{"N", x}, {"ratio", r}, {"deviation", std::abs(r - 1.0)}});
  }
  s.results["decades"] = decades;
}

std::pair<std::int64_t, std::int64_t> scan_range(Session& s, std::uint64_t limit,
                                                 double eps) {
  const std::int64_t k0 = s.given("--k0") ? s.opt().k0 : default_k0(eps);
  const std::int64_t kmax = s.given("--kmax") ? s.opt().kmax : max_scale_within(limit, eps);
  if (k0 < 1) throw InvalidArgument("--k0 must be >= 1");
  s.parameters["k0"] = k0;
  s.parameters["kmax"] = kmax;
  return {k0, kmax};
}

void cmd_scan(Session& s) {
  const auto limit = s.limit();
  const double eps = s.eps();
  if (eps >= 1.0) throw InvalidArgument("scan needs eps < 1");
  const auto [k0, kmax] = scan_range(s, limit, eps);
  const PrimeSource primes(limit);
  const auto records = scan_scales(k0, kmax, eps, primes, s.opt().threads);
  json rows = json::array();
  json exceptions = json::array();
  std::ostringstream csv;
  csv << "k,first,last,cutoff,prime_sum,semiprime_sum,threshold,prime_flag,semiprime_flag\r\n";
  csv.precision(17);
  for (const auto& r : records) {
    rows.push_back({{"k", r.k},
                    {"first", r.interval.first},
                    {"last", r.interval.last},
                    {"cutoff", r.cutoff},
                    {"prime_sum", r.prime_sum},
                    {"semiprime_sum", r.semiprime_sum},
                    {"threshold", r.threshold},
                    {"prime_flag", r.prime_flag},
                    {"semiprime_flag", r.semiprime_flag}});
    if (!r.either()) exceptions.push_back(r.k);
    csv << r.k << ',' << r.interval.first << ',' << r.interval.last << ',' << r.cutoff
        << ',' << r.prime_sum << ',' << r.semiprime_sum << ',' << r.threshold << ','
        << (r.prime_flag ? "true" : "false") << ','
        << (r.semiprime_flag ? "true" : "false") << "\r\n";
  }
  s.results["records"] = rows;
  s.results["exceptions"] = exceptions;
  json pairs = json::array();
  for (const auto& [k, kk] : adjacent_pairs(records)) pairs.push_back({k, kk});
  s.results["adjacent_pairs"] = pairs;
  s.csv = csv.str();
}

TripleSearchOptions triple_options(Session& s, std::uint64_t N, double eps) {
  TripleSearchOptions t;
  t.threads = s.opt().threads;
  const auto [k0, kmax] = scan_range(s, N, eps);
  t.k0 = k0;
  t.kmax = kmax;
  return t;
}

void cmd_triple(Session& s) {
  const auto N = s.limit();
  const double eps = s.eps();
  const ArithTable mu = s.table(TableKind::mobius, N);
  const auto topt = triple_options(s, N, eps);
  try {
    s.results["status"] = "certified";
    s.results["certificate"] = triple_json(find_good_triple(mu, N, eps, topt));
  } catch (const TripleNotFound& e) {
    s.results["status"] = "not_found";
    s.results["diagnostics"] = diagnostics_json(e.diagnostics());
    try {
      s.results["candidate"] = triple_json(find_candidate_triple(mu, N, eps, topt));
    } catch (const TripleNotFound&) {
      s.results["candidate"] = nullptr;
    }
    s.warnings.push_back(e.what());
    s.exit_code = static_cast<int>(ErrorCode::not_found);
  }
}

void cmd_chain(Session& s) {
  const auto N = s.limit();
  const double eps = s.eps();
  s.parameters["allow_uncertified"] = s.opt().allow_uncertified;
  const ArithTable mu = s.table(TableKind::mobius, N);
  const auto topt = triple_options(s, N, eps);
  TripleCertificate triple;
  try {
    triple = find_good_triple(mu, N, eps, topt);
  } catch (const TripleNotFound& e) {
    if (!s.opt().allow_uncertified) {
      s.results["status"] = "not_found";
      s.results["diagnostics"] = diagnostics_json(e.diagnostics());
      s.warnings.push_back(e.what());
      s.exit_code = static_cast<int>(ErrorCode::not_found);
      return;
    }
    triple = find_candidate_triple(mu, N, eps, topt);
    s.warnings.push_back("chain evaluated on an uncertified triple");
  }
  try {
    s.results["report"] = chain_json(chain_verify(mu, N, eps, triple));
    s.results["status"] = "within_bound";
  } catch (const ChainViolation& v) {
    s.results["report"] = chain_json(v.report());
    s.results["status"] = "violation";
    s.results["violating_stage"] = v.stage();
    s.warnings.push_back(v.what());
    s.exit_code = static_cast<int>(ErrorCode::chain_violation);
  }
}

void cmd_decompose(Session& s) {
  const auto N = s.limit();
  const double eps = s.eps();
  const ArithTable mu = s.table(TableKind::mobius, N);
  const ArithTable lam = s.table(TableKind::mangoldt, N);
  const auto r = scale_decomposition(mu, lam, N, eps);
  s.results["exact"] = r.exact;
  s.results["switched"] = r.switched;
  s.results["reconstructed"] = r.reconstructed;
  s.results["relative_error"] = r.relative_error;
  s.results["normalized_error"] = r.normalized_error;
  s.results["violations_a_ge_100"] = r.violations(100.0);
  json blocks = json::array();
  std::ostringstream csv;
  csv.precision(17);
  csv << "a,first,last,block_sum,bound,within,mertens_anchor\r\n";
  for (const auto& b : r.blocks) {
    blocks.push_back({{"a", b.a},
                      {"first", b.first},
                      {"last", b.last},
                      {"block_sum", b.block_sum},
                      {"bound", b.bound},
                      {"within", b.within},
                      {"mertens_anchor", b.mertens_anchor}});
    csv << b.a << ',' << b.first << ',' << b.last << ',' << b.block_sum << ',' << b.bound
        << ',' << (b.within ? "true" : "false") << ',' << b.mertens_anchor << "\r\n";
  }
  s.results["blocks"] = blocks;
  s.csv = csv.str();
}

void cmd_entropy(Session& s) {
  const auto N = s.limit();
  const double eps = s.eps();
  const auto primes = s.prime_list();
  const std::size_t window = s.opt().window;
  const std::uint64_t shift = s.opt().shift;
  s.parameters["window"] = window;
  s.parameters["shift"] = shift;
  s.parameters["budget"] = s.opt().budget;
  std::uint64_t reach = window + shift;
  for (auto p : primes) reach = std::max(reach, p);
  const ArithTable mu = s.table(TableKind::mobius, N + reach);
  const auto r = entropy_decrement_scan(mu, N, primes, eps, 13, s.opt().budget);
  json entries = json::array();
  std::ostringstream csv;
  csv.precision(17);
  csv << "p,window,I,bad,states,bias\r\n";
  for (const auto& e : r.entries) {
    entries.push_back({{"p", e.p},
                       {"window", e.window},
                       {"conditioned_on", e.conditioned_on},
                       {"I", e.I},
                       {"bad", e.bad},
                       {"states", e.states},
                       {"bias", e.bias}});
    csv << e.p << ',' << e.window << ',' << e.I << ',' << (e.bad ? "true" : "false") << ','
        << e.states << ',' << e.bias << "\r\n";
  }
  s.results["H_x1"] = r.H_x1;
  s.results["budget"] = r.budget;
  s.results["bad_reciprocal_sum"] = r.bad_reciprocal_sum;
  s.results["within_budget"] = r.within();
  s.results["entries"] = entries;
  s.results["stationarity_gap"] = stationarity_gap(mu, N, window, shift);
  s.csv = csv.str();
}

void cmd_pinsker(Session& s) {
  const std::size_t trials = s.given("--trials") ? s.opt().trials : 1000;
  s.parameters["trials"] = trials;
  s.parameters["seed"] = s.opt().seed;
  const PinskerAudit a = pinsker_audit(trials, s.opt().seed);
  s.results["trials"] = a.trials;
  s.results["seed"] = a.seed;
  s.results["min_margin"] = a.min_margin;
  s.results["max_d_tv"] = a.max_d_tv;
  s.results["failures"] = a.failures;
  // Perfectly correlated fair bits.
  const EmpiricalDistribution bits(2, {0, 0, 1, 1}, {1.0, 1.0});
  const std::size_t cx = 0, cy = 1;
  const auto g = pinsker_gap(bits, std::span<const std::size_t>(&cx, 1),
                             std::span<const std::size_t>(&cy, 1));
  s.results["correlated_bits"] = {{"d_tv", g.d_tv}, {"sqrt_I", g.sqrt_I}, {"margin", g.margin}};
}

std::string usage_suffix(const CLI::App& app) { return app.help(); }

}  // namespace

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::map<std::string, std::string> validate_config(std::string_view text) {
  std::map<std::string, std::string> cfg = {
      {"eps", "0.1"}, {"cache", ""}, {"budget", std::to_string(kDefaultOutcomeBudget)}};
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    const std::string where = "config line " + std::to_string(line_no);
    if (eq == std::string::npos) throw InvalidArgument(where + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw InvalidArgument(where + ": empty key");
    if (!cfg.count(key)) throw InvalidArgument(where + ": unknown key '" + key + "'");
    if (key == "eps") {
      const double e = parse_double(value, where);
      if (!(e > 0.0 && e <= 1.0)) throw InvalidArgument(where + ": eps must lie in (0, 1]");
    } else if (key == "budget") {
      if (parse_u64(value, where) == 0) throw InvalidArgument(where + ": budget must be >= 1");
    }
    cfg[key] = value;
  }
  return cfg;
}

RunOutcome run(const std::vector<std::string>& argv) {
  RunOutcome outcome;
  const std::string started = utc_now();
  Options opt;

  CLI::App app{"Numerical audits for an elementary proof of the prime number theorem",
               argv.empty() ? "pntlab" : argv[0]};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  using Handler = void (*)(Session&);
  std::vector<std::pair<CLI::App*, Handler>> commands;
  auto add = [&](const char* name, const char* about, Handler h) {
    CLI::App* sub = app.add_subcommand(name, about);
    sub->add_option("--limit", opt.limit, "table limit or scale N");
    sub->add_option("--out", opt.out, "write the report here instead of stdout");
    sub->add_option("--cache", opt.cache, "table cache directory");
    sub->add_option("--format", opt.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--threads", opt.threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--config", opt.config, "key=value defaults file");
    commands.emplace_back(sub, h);
    return sub;
  };
  auto eps_opt = [&](CLI::App* sub) { sub->add_option("--eps", opt.eps, "epsilon"); };
  auto scale_opts = [&](CLI::App* sub) {
    sub->add_option("--k0", opt.k0, "first scale index");
    sub->add_option("--kmax", opt.kmax, "last scale index");
  };

  add("sieve", "build an arithmetic table", cmd_sieve)
      ->add_option("--kind", opt.kind, "mobius, mangoldt, log or lambda2");
  add("convolve", "check Mobius inversion and the mu log identity", cmd_convolve);
  {
    auto* sub = add("tk", "Turan-Kubilius sum and a seeded BHM audit", cmd_tk);
    sub->add_option("--pmax", opt.pmax, "largest prime in S");
    sub->add_option("--trials", opt.trials, "random BHM systems");
    sub->add_option("--seed", opt.seed, "audit seed");
  }
  {
    auto* sub = add("goodprimes", "classify primes up to --pmax", cmd_goodprimes);
    eps_opt(sub);
    sub->add_option("--pmax", opt.pmax, "largest prime classified");
  }
  add("selberg", "Selberg symmetry ratio", cmd_selberg);
  {
    auto* sub = add("scan", "prime and semiprime scale flags", cmd_scan);
    eps_opt(sub);
    scale_opts(sub);
  }
  {
    auto* sub = add("triple", "search for a good triple p, p1, p2", cmd_triple);
    eps_opt(sub);
    scale_opts(sub);
  }
  {
    auto* sub = add("chain", "evaluate the averaged Mobius chain", cmd_chain);
    eps_opt(sub);
    scale_opts(sub);
    sub->add_flag("--allow-uncertified", opt.allow_uncertified,
                  "fall back to a triple whose primes are not all good");
  }
  {
    auto* sub = add("decompose", "Brun-Titchmarsh block decomposition", cmd_decompose);
    eps_opt(sub);
  }
  {
    auto* sub = add("entropy", "entropy decrement scan and stationarity gap", cmd_entropy);
    eps_opt(sub);
    sub->add_option("--primes", opt.primes, "ascending comma-separated primes");
    sub->add_option("--window", opt.window, "stationarity block length")
        ->check(CLI::Range(1, 40));
    sub->add_option("--shift", opt.shift, "stationarity shift");
  }
  {
    auto* sub = add("pinsker", "randomized Pinsker audit", cmd_pinsker);
    sub->add_option("--trials", opt.trials, "random 4x4 joints");
    sub->add_option("--seed", opt.seed, "audit seed");
  }

  std::vector<const char*> cargs;
  for (const auto& a : argv) cargs.push_back(a.c_str());
  if (cargs.empty()) cargs.push_back("pntlab");

  try {
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::CallForHelp&) {
    outcome.output = app.help();
    return outcome;
  } catch (const CLI::CallForVersion&) {
    outcome.output = std::string(kToolVersion) + "\n";
    return outcome;
  } catch (const CLI::ParseError& e) {
    outcome.exit_code = static_cast<int>(ErrorCode::invalid_argument);
    outcome.diagnostics = std::string("error: ") + e.what() + "\n" + usage_suffix(app);
    return outcome;
  }

  CLI::App* chosen = nullptr;
  Handler handler = nullptr;
  for (auto& [sub, h] : commands)
    if (sub->parsed()) {
      chosen = sub;
      handler = h;
    }

  auto given = [chosen](const char* flag) {
    const CLI::Option* o = chosen->get_option_no_throw(flag);
    return o != nullptr && o->count() > 0;
  };
  Session session(opt, given);

  try {
    if (!opt.config.empty()) {
      std::ifstream in(opt.config);
      if (!in) throw InvalidArgument("cannot read config " + opt.config);
      std::stringstream buf;
      buf << in.rdbuf();
      const auto cfg = validate_config(buf.str());
      if (!given("--eps")) opt.eps = std::stod(cfg.at("eps"));
      if (!given("--cache")) opt.cache = cfg.at("cache");
      opt.budget = std::stoull(cfg.at("budget"));
    }
    session.parameters["threads"] = opt.threads;
    if (!opt.cache.empty()) session.parameters["cache"] = opt.cache;
    handler(session);

    if (opt.format == "csv" && session.csv.empty())
      throw InvalidArgument(chosen->get_name() + " has no tabular output; use --format json");

    std::string text;
    if (opt.format == "csv") {
      text = session.csv;
    } else {
      json report = {{"command", chosen->get_name()},
                     {"parameters", session.parameters},
                     {"results", session.results},
                     {"tool_version", kToolVersion},
                     {"table_checksums", session.checksums},
                     {"started", started},
                     {"finished", utc_now()},
                     {"warnings", session.warnings}};
      text = report.dump(2) + "\n";
    }
    if (!opt.out.empty()) {
      std::ofstream out(opt.out, std::ios::binary | std::ios::trunc);
      if (!out) throw ResourceError("cannot write " + opt.out);
      out << text;
    } else {
      outcome.output = std::move(text);
    }
    outcome.exit_code = session.exit_code;
    for (const auto& w : session.warnings) outcome.diagnostics += "warning: " + w + "\n";
  } catch (const Error& e) {
    outcome.exit_code = static_cast<int>(e.code());
    outcome.diagnostics += std::string("error: ") + e.what() + "\n";
    if (e.code() == ErrorCode::invalid_argument) outcome.diagnostics += chosen->help();
  } catch (const std::bad_alloc&) {
    outcome.exit_code = static_cast<int>(ErrorCode::resource);
    outcome.diagnostics += "error: out of memory\n";
  } catch (const std::exception& e) {
    outcome.exit_code = static_cast<int>(ErrorCode::internal);
    outcome.diagnostics += std::string("error: ") + e.what() + "\n";
  }
  return outcome;
}

}  // namespace pntlab
