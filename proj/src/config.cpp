#include "zerolab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "zerolab/measures.hpp"

namespace zerolab {

std::string to_string(Command c) {
  switch (c) {
    case Command::Bergman: return "bergman";
    case Command::Sample: return "sample";
    case Command::Equidist: return "equidist";
    case Command::Moderate: return "moderate";
    case Command::Constants: return "constants";
    case Command::Approx: return "approx";
  }
  return "unknown";
}

namespace {

struct Entry {
  std::string key;
  std::string value;
  int line = 0;
  int column = 0;  ///< 1-based column of the value
  bool used = false;
};

struct Section {
  std::string name;
  int line = 0;
  std::vector<Entry> entries;

  Entry* find(const std::string& key) {
    for (auto& e : entries)
      if (e.key == key) {
        e.used = true;
        return &e;
      }
    return nullptr;
  }
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<Section> tokenize(const std::string& text) {
  std::vector<Section> sections;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '"') quoted = !quoted;
      if (s[i] == '#' && !quoted) {
        s.resize(i);
        break;
      }
    }
    if (quoted) throw ParseError(line, static_cast<int>(raw.find('"')) + 1, "unterminated string");
    const std::string t = trim(s);
    if (t.empty()) continue;
    const int indent = static_cast<int>(s.find_first_not_of(" \t")) + 1;
    if (t.front() == '[') {
      if (t.back() != ']') throw ParseError(line, indent, "section header must end with ']'");
      const std::string name = trim(t.substr(1, t.size() - 2));
      if (name.empty()) throw ParseError(line, indent + 1, "empty section name");
      for (const auto& sec : sections)
        if (sec.name == name) throw ParseError(line, indent + 1, "duplicate section [" + name + "]");
      sections.push_back({name, line, {}});
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ParseError(line, indent, "expected 'key = value'");
    if (sections.empty()) throw ParseError(line, indent, "key outside of any section");
    const std::string key = trim(s.substr(0, eq));
    if (key.empty()) throw ParseError(line, indent, "missing key before '='");
    for (char ch : key)
      if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '.'))
        throw ParseError(line, indent, "invalid character in key '" + key + "'");
    std::string value = s.substr(eq + 1);
    const auto vb = value.find_first_not_of(" \t");
    const int column = static_cast<int>(eq + 1 + (vb == std::string::npos ? 0 : vb)) + 1;
    value = trim(value);
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    auto& sec = sections.back();
    for (const auto& e : sec.entries)
      if (e.key == key) throw ParseError(line, indent, "duplicate key '" + key + "' in [" + sec.name + "]");
    sec.entries.push_back({key, value, line, column, false});
  }
  return sections;
}

double parse_double(const std::string& s, const Entry& e) {
  const std::string t = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw ParseError(e.line, e.column, "expected a number for '" + e.key + "', got '" + t + "'");
  return v;
}

long long parse_int(const std::string& s, const Entry& e) {
  const std::string t = trim(s);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw ParseError(e.line, e.column, "expected an integer for '" + e.key + "', got '" + t + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& s, const Entry& e) {
  const std::string t = trim(s);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw ParseError(e.line, e.column, "expected an unsigned integer for '" + e.key + "', got '" + t + "'");
  return v;
}

bool parse_bool(const Entry& e) {
  if (e.value == "true" || e.value == "yes" || e.value == "1") return true;
  if (e.value == "false" || e.value == "no" || e.value == "0") return false;
  throw ParseError(e.line, e.column, "expected true or false for '" + e.key + "'");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

template <typename T, typename F>
std::vector<T> parse_list(const Entry& e, F&& one) {
  std::vector<T> out;
  if (trim(e.value).empty()) return out;
  for (const auto& item : split(e.value, ',')) out.push_back(one(item, e));
  return out;
}

// a, a+bi, a-bi, bi, i, -i
cplx parse_complex(const std::string& s, const Entry& e) {
  const std::string t = trim(s);
  if (t.empty()) throw ParseError(e.line, e.column, "empty complex number in '" + e.key + "'");
  if (t.back() != 'i') return {parse_double(t, e), 0.0};
  const std::string body = t.substr(0, t.size() - 1);
  std::size_t split_at = std::string::npos;
  for (std::size_t i = body.size(); i-- > 1;)
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      split_at = i;
      break;
    }
  auto imag = [&](const std::string& u) {
    if (u.empty() || u == "+") return 1.0;
    if (u == "-") return -1.0;
    return parse_double(u[0] == '+' ? u.substr(1) : u, e);
  };
  if (split_at == std::string::npos) return {0.0, imag(body)};
  return {parse_double(body.substr(0, split_at), e), imag(body.substr(split_at))};
}

std::string fmt(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string fmt(cplx z) {
  std::string s = fmt(z.real());
  if (z.imag() != 0.0 || std::signbit(z.imag())) s += (std::signbit(z.imag()) ? "-" : "+") + fmt(std::abs(z.imag())) + "i";
  return s;
}

template <typename T>
std::string join(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    if constexpr (std::is_floating_point_v<T>) out += fmt(v[i]);
    else out += std::to_string(v[i]);
  }
  return out;
}

std::string fmt_vector(const CVector& v) {
  std::string out;
  for (int i = 0; i < v.size(); ++i) out += (i ? ", " : "") + fmt(v[i]);
  return out;
}

CVector parse_cvector(const std::string& s, const Entry& e) {
  const auto parts = split(s, ',');
  CVector v(static_cast<int>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) v[static_cast<int>(i)] = parse_complex(parts[i], e);
  return v;
}

// "coeffs @ weight"
std::pair<CVector, double> parse_weighted(const std::string& s, const Entry& e) {
  const auto at = s.find('@');
  if (at == std::string::npos) throw ParseError(e.line, e.column, "expected 'coefficients @ weight' in '" + e.key + "'");
  return {parse_cvector(s.substr(0, at), e), parse_double(s.substr(at + 1), e)};
}

CMatrix parse_matrix(const Entry& e) {
  const auto rows = split(e.value, ';');
  std::vector<std::vector<cplx>> vals;
  for (const auto& r : rows) {
    std::vector<cplx> row;
    std::istringstream in(r);
    std::string tok;
    while (in >> tok) row.push_back(parse_complex(tok, e));
    vals.push_back(row);
  }
  const auto size = vals.size();
  CMatrix m(static_cast<int>(size), static_cast<int>(size));
  for (std::size_t i = 0; i < size; ++i) {
    if (vals[i].size() != size) throw ParseError(e.line, e.column, "matrix '" + e.key + "' must be square");
    for (std::size_t j = 0; j < size; ++j) m(static_cast<int>(i), static_cast<int>(j)) = vals[i][j];
  }
  return m;
}

std::string fmt_matrix(const CMatrix& m) {
  std::string out;
  for (int i = 0; i < m.rows(); ++i) {
    if (i) out += "; ";
    for (int j = 0; j < m.cols(); ++j) out += (j ? " " : "") + fmt(m(i, j));
  }
  return out;
}

const std::map<std::string, Command>& command_names() {
  static const std::map<std::string, Command> names{{"bergman", Command::Bergman},   {"sample", Command::Sample},
                                                    {"equidist", Command::Equidist}, {"moderate", Command::Moderate},
                                                    {"constants", Command::Constants}, {"approx", Command::Approx}};
  return names;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  auto sections = tokenize(text);
  RunConfig c;
  auto& x = c.experiment;
  x.p_list = {10};
  std::vector<std::string> issues;

  auto section = [&](const std::string& name) -> Section* {
    for (auto& s : sections)
      if (s.name == name) return &s;
    return nullptr;
  };

  if (Section* run = section("run")) {
    if (Entry* e = run->find("command")) {
      const auto it = command_names().find(e->value);
      if (it == command_names().end())
        issues.push_back("line " + std::to_string(e->line) + ": unknown command '" + e->value + "'");
      else
        c.command = it->second;
    }
    if (Entry* e = run->find("n")) x.n = static_cast<int>(parse_int(e->value, *e));
    if (Entry* e = run->find("m")) x.m = static_cast<int>(parse_int(e->value, *e));
    if (Entry* e = run->find("p_list"))
      x.p_list = parse_list<int>(*e, [](const std::string& s, const Entry& en) { return static_cast<int>(parse_int(s, en)); });
    if (Entry* e = run->find("nsamples")) x.nsamples = static_cast<long>(parse_int(e->value, *e));
    if (Entry* e = run->find("seed")) x.seed = parse_u64(e->value, *e);
    if (Entry* e = run->find("deterministic")) x.deterministic = parse_bool(*e);
    if (Entry* e = run->find("dictionary")) x.dictionary = e->value;
    if (Entry* e = run->find("lambda_rule")) {
      if (e->value == "log") x.lambda_rule.kind = LambdaRule::Kind::Log;
      else if (e->value == "power") x.lambda_rule.kind = LambdaRule::Kind::Power;
      else issues.push_back("line " + std::to_string(e->line) + ": lambda_rule must be 'log' or 'power'");
    }
    if (Entry* e = run->find("lambda_coef")) x.lambda_rule.coefficient = parse_double(e->value, *e);
    if (Entry* e = run->find("threshold_c")) x.threshold_c = parse_double(e->value, *e);
    if (Entry* e = run->find("resolution")) x.resolution = static_cast<int>(parse_int(e->value, *e));
    if (Entry* e = run->find("strict")) x.strict = parse_bool(*e);
    if (Entry* e = run->find("threads")) x.threads = static_cast<unsigned>(parse_int(e->value, *e));
    if (Entry* e = run->find("atom_radius")) x.atom_radius = parse_double(e->value, *e);
    if (Entry* e = run->find("c0")) c.c0 = parse_double(e->value, *e);
    if (Entry* e = run->find("alpha0")) c.alpha0 = parse_double(e->value, *e);
    if (Entry* e = run->find("epsilon")) c.epsilon = parse_double(e->value, *e);
    if (Entry* e = run->find("d_kp"))
      c.d_kp = parse_list<int>(*e, [](const std::string& s, const Entry& en) { return static_cast<int>(parse_int(s, en)); });
    if (Entry* e = run->find("measure_R")) c.measure_R = parse_bool(*e);
    if (Entry* e = run->find("rate_band")) c.rate_band = parse_double(e->value, *e);
    if (Entry* e = run->find("max_failure_fraction")) c.max_failure_fraction = parse_double(e->value, *e);
  }

  const int n = std::clamp(x.n, 1, 2);
  const int slots = std::clamp(x.m, 1, 2);
  x.metrics.assign(static_cast<std::size_t>(slots), MetricWeight(n));
  for (auto& sec : sections) {
    if (sec.name.rfind("metric.", 0) != 0) continue;
    int k = 0;
    const std::string idx = sec.name.substr(7);
    const auto [ptr, ec] = std::from_chars(idx.data(), idx.data() + idx.size(), k);
    if (ec != std::errc() || ptr != idx.data() + idx.size()) throw ParseError(sec.line, 2, "bad metric index '" + idx + "'");
    if (k < 1 || k > slots) {
      issues.push_back("line " + std::to_string(sec.line) + ": [metric." + idx + "] exceeds m = " + std::to_string(x.m));
      for (auto& e : sec.entries) e.used = true;
      continue;
    }
    MetricWeight& h = x.metrics[static_cast<std::size_t>(k - 1)];
    const Entry* smooth = sec.find("smooth");
    if (Entry* e = sec.find("quadratic")) {
      if (smooth && smooth->value == "zero") issues.push_back("[" + sec.name + "]: quadratic given with smooth = zero");
      try {
        h.set_quadratic(parse_matrix(*e));
      } catch (const ParseError&) {
        throw;
      } catch (const Error& err) {
        issues.push_back("[" + sec.name + "] line " + std::to_string(e->line) + ": " + err.what());
      }
    } else if (smooth && smooth->value == "quadratic") {
      issues.push_back("[" + sec.name + "]: smooth = quadratic needs a quadratic matrix");
    }
    if (smooth && smooth->value != "zero" && smooth->value != "quadratic")
      issues.push_back("[" + sec.name + "]: smooth must be 'zero' or 'quadratic'");
    std::vector<Entry*> poles;
    for (auto& e : sec.entries)
      if (e.key.rfind("singular.", 0) == 0) poles.push_back(&e);
    std::sort(poles.begin(), poles.end(), [](const Entry* a, const Entry* b) {
      return std::stoi("0" + a->key.substr(9)) < std::stoi("0" + b->key.substr(9));
    });
    for (Entry* e : poles) {
      e->used = true;
      const auto [form, lambda] = parse_weighted(e->value, *e);
      try {
        h.add_singular(form, lambda);
      } catch (const Error& err) {
        issues.push_back("[" + sec.name + "] line " + std::to_string(e->line) + ": " + err.what());
      }
    }
    if (Entry* e = sec.find("positivity_margin")) h.positivity_margin = parse_double(e->value, *e);
    if (Entry* e = sec.find("hoelder")) {
      std::istringstream in(e->value);
      std::string a, b, d;
      if (!(in >> a >> b >> d)) throw ParseError(e->line, e->column, "hoelder needs 'c nu delta'");
      h.hoelder = {parse_double(a, *e), parse_double(b, *e), parse_double(d, *e)};
    }
  }

  if (Section* m = section("measure")) {
    if (Entry* e = m->find("mode")) {
      if (e->value == "fs") x.measure.mode = MeasureMode::FS;
      else if (e->value == "perturbed") x.measure.mode = MeasureMode::Perturbed;
      else issues.push_back("line " + std::to_string(e->line) + ": measure mode must be 'fs' or 'perturbed'");
    }
    if (Entry* e = m->find("c_p")) x.measure.c_p = parse_double(e->value, *e);
    if (Entry* e = m->find("rho")) x.measure.rho = parse_double(e->value, *e);
    if (Entry* e = m->find("bump_index")) x.measure.bump_index = static_cast<int>(parse_int(e->value, *e));
    if (Entry* e = m->find("N")) c.moderate_N = static_cast<int>(parse_int(e->value, *e));
    if (Entry* e = m->find("probe")) c.probe = e->value;
    if (Entry* e = m->find("alpha")) c.alpha = parse_list<double>(*e, parse_double);
    if (Entry* e = m->find("growth_N"))
      c.growth_N = parse_list<int>(*e, [](const std::string& s, const Entry& en) { return static_cast<int>(parse_int(s, en)); });
    if (Entry* e = m->find("t_list")) c.t_list = parse_list<double>(*e, parse_double);
  }

  if (Section* t = section("target")) {
    TargetCurrent target;
    target.fs_weight = 0.0;
    if (Entry* e = t->find("kind")) {
      if (e->value == "fs") target.fs_weight = 1.0;
      else if (e->value == "circle") target.circle_weight = 1.0;
      else if (e->value != "atoms" && e->value != "mixture")
        issues.push_back("line " + std::to_string(e->line) + ": target kind must be fs, atoms, circle or mixture");
    } else {
      target.fs_weight = 1.0;
    }
    if (Entry* e = t->find("fs_weight")) target.fs_weight = parse_double(e->value, *e);
    if (Entry* e = t->find("circle_weight")) target.circle_weight = parse_double(e->value, *e);
    if (Entry* e = t->find("circle_radius")) target.circle_radius = parse_double(e->value, *e);
    if (Entry* e = t->find("atoms")) {
      for (const auto& item : split(e->value, ';')) {
        if (item.empty()) continue;
        const auto [v, w] = parse_weighted(item, *e);
        if (v.size() != 2) throw ParseError(e->line, e->column, "target atoms need two homogeneous coordinates");
        if (!(v.norm() > 0)) throw ParseError(e->line, e->column, "target atom is the zero vector");
        target.atoms.push_back({ProjectivePoint(v), w});
      }
    }
    if (Entry* e = t->find("strategy")) {
      if (e->value == "iid") c.strategy = RootStrategy::Iid;
      else if (e->value == "stratified") c.strategy = RootStrategy::Stratified;
      else issues.push_back("line " + std::to_string(e->line) + ": strategy must be 'iid' or 'stratified'");
    }
    if (Entry* e = t->find("trials")) c.trials = static_cast<int>(parse_int(e->value, *e));
    c.target = target;
  }

  if (Section* o = section("output")) {
    if (Entry* e = o->find("dir")) c.out_dir = e->value;
    if (Entry* e = o->find("csv")) c.csv_name = e->value;
    if (Entry* e = o->find("json")) c.json_name = e->value;
    if (Entry* e = o->find("cache_dir")) x.cache_dir = e->value;
  }

  static const std::set<std::string> known{"run", "measure", "target", "output"};
  for (auto& sec : sections) {
    if (!known.count(sec.name) && sec.name.rfind("metric.", 0) != 0)
      issues.push_back("line " + std::to_string(sec.line) + ": unknown section [" + sec.name + "]");
    for (auto& e : sec.entries)
      if (!e.used) issues.push_back("line " + std::to_string(e.line) + ": unknown key '" + e.key + "' in [" + sec.name + "]");
  }

  try {
    validate(c);
  } catch (const ValidationErrors& v) {
    issues.insert(issues.end(), v.issues().begin(), v.issues().end());
  }
  if (!issues.empty()) throw ValidationErrors(std::move(issues));
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void validate(const RunConfig& c) {
  std::vector<std::string> issues;
  try {
    validate(c.experiment);
  } catch (const ValidationErrors& v) {
    issues = v.issues();
  }
  auto expect = [&](bool ok, const std::string& msg) {
    if (!ok) issues.push_back(msg);
  };
  expect(c.epsilon > 0, "epsilon must be positive");
  expect(c.c0 > 0 && c.c0 <= 1, "c0 must lie in (0, 1]");
  expect(c.alpha0 > 0 && c.alpha0 < 1, "alpha0 must lie in (0, 1)");
  expect(c.max_failure_fraction >= 0 && c.max_failure_fraction <= 1, "max_failure_fraction must lie in [0, 1]");
  expect(c.rate_band == 0 || c.rate_band >= 1, "rate_band must be 0 (off) or >= 1");
  for (int d : c.d_kp) expect(d >= 1, "d_kp entries must be >= 1");
  expect(c.experiment.measure.rho > 0 && c.experiment.measure.rho <= 1, "rho must lie in (0, 1]");
  if (c.command == Command::Moderate) {
    expect(c.moderate_N >= 1, "measure N must be >= 1");
    bool found = false;
    for (const auto& p : standard_probes(std::max(1, c.moderate_N))) found = found || p.name == c.probe;
    expect(found, "unknown probe '" + c.probe + "'");
    for (double a : c.alpha) expect(a >= 0, "alpha entries must be >= 0");
    for (int N : c.growth_N) expect(N >= 1, "growth_N entries must be >= 1");
    expect(std::is_sorted(c.t_list.begin(), c.t_list.end()), "t_list must be ascending");
    for (double t : c.t_list) expect(t >= 0, "t_list entries must be >= 0");
  }
  if (c.command == Command::Approx) {
    expect(c.experiment.n == 1, "approx runs on P^1 only");
    expect(c.trials >= 1, "trials must be >= 1");
    try {
      c.target.validate();
    } catch (const Error& e) {
      issues.push_back(std::string("target: ") + e.what());
    }
  }
  if (!issues.empty()) throw ValidationErrors(std::move(issues));
}

std::string print_config(const RunConfig& c) {
  const auto& x = c.experiment;
  std::ostringstream o;
  o << "[run]\n";
  o << "command = " << to_string(c.command) << "\n";
  o << "n = " << x.n << "\nm = " << x.m << "\n";
  o << "p_list = " << join(x.p_list) << "\n";
  o << "nsamples = " << x.nsamples << "\n";
  o << "seed = " << x.seed << "\n";
  o << "deterministic = " << (x.deterministic ? "true" : "false") << "\n";
  o << "dictionary = " << x.dictionary << "\n";
  o << "lambda_rule = " << (x.lambda_rule.kind == LambdaRule::Kind::Log ? "log" : "power") << "\n";
  o << "lambda_coef = " << fmt(x.lambda_rule.coefficient) << "\n";
  o << "threshold_c = " << fmt(x.threshold_c) << "\n";
  o << "resolution = " << x.resolution << "\n";
  o << "strict = " << (x.strict ? "true" : "false") << "\n";
  o << "threads = " << x.threads << "\n";
  o << "atom_radius = " << fmt(x.atom_radius) << "\n";
  o << "c0 = " << fmt(c.c0) << "\nalpha0 = " << fmt(c.alpha0) << "\nepsilon = " << fmt(c.epsilon) << "\n";
  if (!c.d_kp.empty()) o << "d_kp = " << join(c.d_kp) << "\n";
  o << "measure_R = " << (c.measure_R ? "true" : "false") << "\n";
  o << "rate_band = " << fmt(c.rate_band) << "\n";
  o << "max_failure_fraction = " << fmt(c.max_failure_fraction) << "\n";
  for (std::size_t k = 0; k < x.metrics.size(); ++k) {
    const auto& h = x.metrics[k];
    o << "\n[metric." << k + 1 << "]\n";
    o << "smooth = " << (h.smooth_kind() == SmoothKind::Zero ? "zero" : "quadratic") << "\n";
    if (h.smooth_kind() == SmoothKind::Quadratic) o << "quadratic = " << fmt_matrix(h.quadratic()) << "\n";
    for (std::size_t j = 0; j < h.singular_terms().size(); ++j)
      o << "singular." << j + 1 << " = " << fmt_vector(h.singular_terms()[j].form) << " @ "
        << fmt(h.singular_terms()[j].lambda) << "\n";
    o << "positivity_margin = " << fmt(h.positivity_margin) << "\n";
    o << "hoelder = " << fmt(h.hoelder.c) << " " << fmt(h.hoelder.nu) << " " << fmt(h.hoelder.delta) << "\n";
  }
  o << "\n[measure]\n";
  o << "mode = " << (x.measure.mode == MeasureMode::FS ? "fs" : "perturbed") << "\n";
  o << "c_p = " << fmt(x.measure.c_p) << "\nrho = " << fmt(x.measure.rho) << "\n";
  o << "bump_index = " << x.measure.bump_index << "\n";
  o << "N = " << c.moderate_N << "\nprobe = " << c.probe << "\n";
  o << "alpha = " << join(c.alpha) << "\n";
  o << "growth_N = " << join(c.growth_N) << "\n";
  o << "t_list = " << join(c.t_list) << "\n";
  o << "\n[target]\n";
  o << "kind = " << to_string(c.target.kind()) << "\n";
  o << "fs_weight = " << fmt(c.target.fs_weight) << "\n";
  o << "circle_weight = " << fmt(c.target.circle_weight) << "\n";
  o << "circle_radius = " << fmt(c.target.circle_radius) << "\n";
  if (!c.target.atoms.empty()) {
    o << "atoms = ";
    for (std::size_t j = 0; j < c.target.atoms.size(); ++j)
      o << (j ? "; " : "") << fmt_vector(c.target.atoms[j].point.coords()) << " @ " << fmt(c.target.atoms[j].weight);
    o << "\n";
  }
  o << "strategy = " << (c.strategy == RootStrategy::Iid ? "iid" : "stratified") << "\n";
  o << "trials = " << c.trials << "\n";
  o << "\n[output]\n";
  o << "dir = \"" << c.out_dir.string() << "\"\n";
  o << "csv = \"" << c.csv_name << "\"\n";
  o << "json = \"" << c.json_name << "\"\n";
  o << "cache_dir = \"" << x.cache_dir.string() << "\"\n";
  return o.str();
}

std::string config_hash(const RunConfig& c) {
  // Where the artifacts go and how many threads produce them do not change
  // the results, so they stay out of the hash.
  RunConfig key = c;
  key.out_dir = RunConfig{}.out_dir;
  key.experiment.threads = ExperimentConfig{}.threads;
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : print_config(key)) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace zerolab
