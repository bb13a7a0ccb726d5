#include "deun/model_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace deun {

using nlohmann::json;

namespace {

using Sev = Issue::Severity;

struct Reader {
  ValidationReport& report;

  void error(IssueKind kind, const std::string& path, const std::string& msg) {
    report.add(Sev::Error, kind, path, msg);
  }

  std::optional<double> real(const json& j, const std::string& path) {
    if (!j.is_number()) {
      error(IssueKind::Malformed, path, "expected a number");
      return std::nullopt;
    }
    return j.get<double>();
  }

  std::optional<int> integer(const json& j, const std::string& path) {
    if (!j.is_number_integer()) {
      error(IssueKind::Malformed, path, "expected an integer");
      return std::nullopt;
    }
    return j.get<int>();
  }

  std::optional<std::vector<double>> reals(const json& j, const std::string& path) {
    if (!j.is_array()) {
      error(IssueKind::Malformed, path, "expected an array of numbers");
      return std::nullopt;
    }
    std::vector<double> out;
    for (size_t k = 0; k < j.size(); ++k) {
      auto v = real(j[k], path + "[" + std::to_string(k) + "]");
      if (!v) return std::nullopt;
      out.push_back(*v);
    }
    return out;
  }

  const json* member(const json& obj, const std::string& key, const std::string& path,
                     bool required = true) {
    auto it = obj.find(key);
    if (it == obj.end()) {
      if (required) error(IssueKind::Malformed, path, "missing key \"" + key + "\"");
      return nullptr;
    }
    return &*it;
  }
};

std::pair<int, int> line_col(std::string_view text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t k = 0; k + 1 < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

EdgeSet read_edges(Reader& rd, const json& doc, const std::string& key, int n) {
  EdgeSet out;
  const json* arr = rd.member(doc, key, key, false);
  if (!arr) return out;
  if (!arr->is_array()) {
    rd.error(IssueKind::Malformed, key, "expected a list of [i, j] pairs");
    return out;
  }
  for (size_t k = 0; k < arr->size(); ++k) {
    const std::string path = key + "[" + std::to_string(k) + "]";
    const json& e = (*arr)[k];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer()) {
      rd.error(IssueKind::Malformed, path, "expected a pair of attribute indices");
      continue;
    }
    const int i = e[0].get<int>(), j = e[1].get<int>();
    if (i < 1 || i > n || j < 1 || j > n) {
      rd.error(IssueKind::Structural, path,
               "edge (" + std::to_string(i) + "," + std::to_string(j) +
                   ") references a vertex outside 1.." + std::to_string(n));
      continue;
    }
    out.insert({i, j});
  }
  return out;
}

std::optional<Cpd> read_cpd(Reader& rd, const json& j, const std::string& path,
                            const std::map<std::string, int>& index_of) {
  if (!j.is_object()) {
    rd.error(IssueKind::Malformed, path, "expected an object");
    return std::nullopt;
  }
  const json* type = rd.member(j, "type", path);
  if (!type) return std::nullopt;
  if (*type == "linear_gaussian") {
    LinearGaussian g;
    bool ok = true;
    if (const json* v = rd.member(j, "intercept", path)) {
      auto r = rd.real(*v, path + ".intercept");
      ok = ok && r;
      g.intercept = r.value_or(0.0);
    } else {
      ok = false;
    }
    if (const json* v = rd.member(j, "sigma", path)) {
      auto r = rd.real(*v, path + ".sigma");
      ok = ok && r;
      g.sigma = r.value_or(1.0);
    } else {
      ok = false;
    }
    if (const json* c = rd.member(j, "coeffs", path, false)) {
      if (!c->is_object()) {
        rd.error(IssueKind::Malformed, path + ".coeffs", "expected an object");
        ok = false;
      } else {
        for (const auto& [name, val] : c->items()) {
          auto it = index_of.find(name);
          if (it == index_of.end()) {
            rd.error(IssueKind::UnknownName, path + ".coeffs." + name, "unknown attribute");
            ok = false;
            continue;
          }
          auto r = rd.real(val, path + ".coeffs." + name);
          if (!r) ok = false;
          g.coefficients[it->second] = r.value_or(0.0);
        }
      }
    }
    if (!ok) return std::nullopt;
    return g;
  }
  if (*type == "tabular") {
    TabularCpd t;
    const json* s = rd.member(j, "support", path);
    const json* rows = rd.member(j, "rows", path);
    if (!s || !rows) return std::nullopt;
    auto support = rd.reals(*s, path + ".support");
    if (!support) return std::nullopt;
    t.support = std::move(*support);
    if (const json* ps = rd.member(j, "parents", path, false)) {
      if (!ps->is_object()) {
        rd.error(IssueKind::Malformed, path + ".parents", "expected an object");
        return std::nullopt;
      }
      for (const auto& [name, grid] : ps->items()) {
        auto it = index_of.find(name);
        if (it == index_of.end()) {
          rd.error(IssueKind::UnknownName, path + ".parents." + name, "unknown attribute");
          return std::nullopt;
        }
        auto g = rd.reals(grid, path + ".parents." + name);
        if (!g) return std::nullopt;
        t.parent_grids[it->second] = std::move(*g);
      }
    }
    if (!rows->is_array()) {
      rd.error(IssueKind::Malformed, path + ".rows", "expected a list of rows");
      return std::nullopt;
    }
    for (size_t k = 0; k < rows->size(); ++k) {
      auto row = rd.reals((*rows)[k], path + ".rows[" + std::to_string(k) + "]");
      if (!row) return std::nullopt;
      t.rows.push_back(std::move(*row));
    }
    return t;
  }
  rd.error(IssueKind::Malformed, path + ".type",
           "unknown distribution type " + type->dump() + " (linear_gaussian or tabular)");
  return std::nullopt;
}

std::optional<UtilityForm> read_form(Reader& rd, const json& j, const std::string& path) {
  if (!j.is_object()) {
    rd.error(IssueKind::Malformed, path, "expected an object");
    return std::nullopt;
  }
  const json* form = rd.member(j, "form", path);
  if (!form) return std::nullopt;
  if (*form == "tabular") {
    const json* v = rd.member(j, "values", path);
    if (!v) return std::nullopt;
    auto values = rd.reals(*v, path + ".values");
    if (!values) return std::nullopt;
    return TabularUtility{std::move(*values)};
  }
  const bool known = *form == "exp_increasing" || *form == "exp_decreasing" ||
                     *form == "one_minus_exp";
  if (!known) {
    rd.error(IssueKind::Malformed, path + ".form",
             "unknown form " + form->dump() +
                 " (exp_increasing, exp_decreasing, one_minus_exp or tabular)");
    return std::nullopt;
  }
  const json* d = rd.member(j, "delta", path);
  if (!d) return std::nullopt;
  auto delta = rd.real(*d, path + ".delta");
  if (!delta) return std::nullopt;
  if (*form == "exp_increasing") return ExpIncreasing{*delta};
  if (*form == "exp_decreasing") return ExpDecreasing{*delta};
  return OneMinusExp{*delta};
}

}  // namespace

ParsedModel read_model_document(std::string_view text, std::string_view source) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    auto [line, col] = line_col(text, e.byte);
    std::string what = e.what();
    if (auto pos = what.find("parse error"); pos != std::string::npos) what = what.substr(pos);
    throw Error(ErrorKind::ParseError, std::string(source) + ":" + std::to_string(line) + ":" +
                                           std::to_string(col) + ": " + what);
  }

  ParsedModel out;
  Reader rd{out.report};
  if (!doc.is_object()) {
    throw Error(ErrorKind::ParseError, std::string(source) + ": top level must be an object");
  }
  static const std::set<std::string> known = {"attributes", "prob_edges", "util_edges",
                                              "decisions",  "cpds",       "utilities",
                                              "corner_weights"};
  for (const auto& [key, v] : doc.items()) {
    if (!known.count(key)) {
      out.report.add(Sev::Warning, IssueKind::Malformed, key, "unrecognized key ignored");
    }
  }

  // attributes
  std::vector<Attribute> attrs;
  std::vector<bool> has_zero, has_star;
  std::map<std::string, int> index_of;
  const json* ja = rd.member(doc, "attributes", "attributes");
  if (ja && (!ja->is_array() || ja->empty())) {
    rd.error(IssueKind::Malformed, "attributes", "expected a non-empty list");
    ja = nullptr;
  }
  if (!ja) return out;
  for (size_t k = 0; k < ja->size(); ++k) {
    const std::string path = "attributes[" + std::to_string(k) + "]";
    const json& a = (*ja)[k];
    Attribute attr;
    attr.index = static_cast<int>(k) + 1;
    has_zero.push_back(false);
    has_star.push_back(false);
    if (!a.is_object()) {
      rd.error(IssueKind::Malformed, path, "expected an object");
      attrs.push_back(attr);
      continue;
    }
    if (const json* v = rd.member(a, "index", path)) {
      if (auto i = rd.integer(*v, path + ".index")) attr.index = *i;
    }
    if (const json* v = rd.member(a, "name", path)) {
      if (v->is_string()) {
        attr.name = v->get<std::string>();
      } else {
        rd.error(IssueKind::Malformed, path + ".name", "expected a string");
      }
    }
    if (const json* v = rd.member(a, "domain", path)) {
      auto d = rd.reals(*v, path + ".domain");
      if (d && d->size() == 2) {
        attr.domain = {(*d)[0], (*d)[1]};
      } else if (d) {
        rd.error(IssueKind::Malformed, path + ".domain", "expected [a, b]");
      }
    }
    if (const json* v = rd.member(a, "ref_zero", path, false)) {
      if (auto r = rd.real(*v, path + ".ref_zero")) {
        attr.ref_zero = *r;
        has_zero.back() = true;
      }
    }
    if (const json* v = rd.member(a, "ref_star", path, false)) {
      if (auto r = rd.real(*v, path + ".ref_star")) {
        attr.ref_star = *r;
        has_star.back() = true;
      }
    }
    if (!attr.name.empty()) index_of.emplace(attr.name, static_cast<int>(k) + 1);
    attrs.push_back(std::move(attr));
  }
  const int n = static_cast<int>(attrs.size());
  auto name_path = [&](int i) { return attrs[i - 1].name; };

  auto deun = Deun::from_edges_unchecked(n, read_edges(rd, doc, "prob_edges", n),
                                         read_edges(rd, doc, "util_edges", n));

  std::vector<std::string> decisions;
  if (const json* jd = rd.member(doc, "decisions", "decisions")) {
    if (!jd->is_array()) {
      rd.error(IssueKind::Malformed, "decisions", "expected a list of labels");
    } else {
      for (size_t k = 0; k < jd->size(); ++k) {
        if ((*jd)[k].is_string()) {
          decisions.push_back((*jd)[k].get<std::string>());
        } else {
          rd.error(IssueKind::Malformed, "decisions[" + std::to_string(k) + "]",
                   "expected a string");
        }
      }
    }
  }

  out.model = make_empty_model(deun, attrs, decisions);
  auto& m = out.model;

  // cpds: "*" supplies defaults, decision entries override them.
  if (const json* jc = rd.member(doc, "cpds", "cpds")) {
    if (!jc->is_object()) {
      rd.error(IssueKind::Malformed, "cpds", "expected an object keyed by decision");
    } else {
      auto apply = [&](const std::string& label, const json& per_attr,
                       const std::vector<int>& targets) {
        if (!per_attr.is_object()) {
          rd.error(IssueKind::Malformed, "cpds." + label, "expected an object keyed by attribute");
          return;
        }
        for (const auto& [name, spec] : per_attr.items()) {
          const std::string path = "cpds." + label + "." + name;
          auto it = index_of.find(name);
          if (it == index_of.end()) {
            rd.error(IssueKind::UnknownName, path, "unknown attribute");
            continue;
          }
          auto cpd = read_cpd(rd, spec, path, index_of);
          if (!cpd) continue;
          for (int d : targets) m.cpds[d][it->second - 1] = *cpd;
        }
      };
      std::vector<int> all(decisions.size());
      std::iota(all.begin(), all.end(), 0);
      if (auto it = jc->find("*"); it != jc->end()) apply("*", *it, all);
      for (const auto& [label, per_attr] : jc->items()) {
        if (label == "*") continue;
        auto d = std::find(decisions.begin(), decisions.end(), label);
        if (d == decisions.end()) {
          rd.error(IssueKind::UnknownName, "cpds." + label, "undeclared decision");
          continue;
        }
        apply(label, per_attr, {static_cast<int>(d - decisions.begin())});
      }
    }
  }

  if (const json* ju = rd.member(doc, "utilities", "utilities")) {
    if (!ju->is_object()) {
      rd.error(IssueKind::Malformed, "utilities", "expected an object keyed by attribute");
    } else {
      for (const auto& [name, per_config] : ju->items()) {
        auto it = index_of.find(name);
        if (it == index_of.end()) {
          rd.error(IssueKind::UnknownName, "utilities." + name, "unknown attribute");
          continue;
        }
        const int i = it->second;
        const int width = static_cast<int>(deun.util_parents(i).size());
        if (!per_config.is_object()) {
          rd.error(IssueKind::Malformed, "utilities." + name,
                   "expected an object keyed by parent configuration");
          continue;
        }
        for (const auto& [key, spec] : per_config.items()) {
          const std::string path = "utilities." + name + "." + (key.empty() ? "\"\"" : key);
          if (!is_valid_key(key, width)) {
            rd.error(IssueKind::KeyLengthMismatch, path,
                     "key '" + key + "' must have " + std::to_string(width) +
                         " characters from {0, *}, one per utility parent of " + name_path(i));
            continue;
          }
          if (auto f = read_form(rd, spec, path)) m.utilities[i - 1][key_to_index(key)] = *f;
        }
      }
    }
  }

  if (const json* jw = rd.member(doc, "corner_weights", "corner_weights")) {
    if (!jw->is_object()) {
      rd.error(IssueKind::Malformed, "corner_weights", "expected an object keyed by configuration");
    } else {
      for (const auto& [key, v] : jw->items()) {
        const std::string path = "corner_weights." + key;
        if (!is_valid_key(key, n)) {
          rd.error(IssueKind::KeyLengthMismatch, path,
                   "key '" + key + "' must have " + std::to_string(n) +
                       " characters from {0, *}, one per attribute");
          continue;
        }
        if (auto w = rd.real(v, path)) m.corner_weights[key_to_index(key)] = *w;
      }
    }
  }

  // Missing reference values follow from the config-0 utility form.
  DecisionModel derived = m;
  derive_reference_values(derived);
  for (int i = 1; i <= n; ++i) {
    if (!has_zero[i - 1]) m.attributes[i - 1].ref_zero = derived.attributes[i - 1].ref_zero;
    if (!has_star[i - 1]) m.attributes[i - 1].ref_star = derived.attributes[i - 1].ref_star;
  }

  auto checked = validate_model(m);
  out.report.issues.insert(out.report.issues.end(), checked.issues.begin(), checked.issues.end());
  return out;
}

DecisionModel parse_model_text(std::string_view text, std::string_view source) {
  auto parsed = read_model_document(text, source);
  if (!parsed.report.clean()) throw ModelValidationError(std::move(parsed.report));
  return std::move(parsed.model);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  if (in.bad()) throw Error(ErrorKind::Io, "cannot read " + path.string());
  return os.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
}

DecisionModel parse_model(const std::filesystem::path& path) {
  return parse_model_text(read_text_file(path), path.string());
}

namespace {

json cpd_to_json(const DecisionModel& m, const Cpd& cpd) {
  if (const auto* g = std::get_if<LinearGaussian>(&cpd)) {
    json coeffs = json::object();
    for (const auto& [p, c] : g->coefficients) coeffs[m.attribute(p).name] = c;
    return {{"type", "linear_gaussian"},
            {"intercept", g->intercept},
            {"coeffs", coeffs},
            {"sigma", g->sigma}};
  }
  const auto& t = std::get<TabularCpd>(cpd);
  json parents = json::object();
  for (const auto& [p, grid] : t.parent_grids) parents[m.attribute(p).name] = grid;
  return {{"type", "tabular"}, {"support", t.support}, {"parents", parents}, {"rows", t.rows}};
}

json form_to_json(const UtilityForm& f) {
  json j = {{"form", std::string(form_name(f))}};
  if (const auto* t = std::get_if<TabularUtility>(&f)) {
    j["values"] = t->values;
  } else {
    j["delta"] = std::visit(
        [](const auto& x) -> double {
          if constexpr (requires { x.delta; }) {
            return x.delta;
          } else {
            return 0.0;
          }
        },
        f);
  }
  return j;
}

bool scalar_array(const json& j) {
  return j.is_array() &&
         std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_primitive(); });
}

void emit(const json& j, int indent, std::string& out) {
  const std::string pad(indent, ' ');
  const std::string inner(indent + 2, ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += inner + json(k).dump() + ": ";
        emit(v, indent + 2, out);
      }
      out += "\n" + pad + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      if (scalar_array(j)) {
        out += "[";
        for (size_t k = 0; k < j.size(); ++k) {
          if (k) out += ", ";
          emit(j[k], indent, out);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (size_t k = 0; k < j.size(); ++k) {
        if (k) out += ",\n";
        out += inner;
        emit(j[k], indent + 2, out);
      }
      out += "\n" + pad + "]";
      return;
    }
    case json::value_t::number_float:
      out += format_real(j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}

}  // namespace

std::string format_real(double v) {
  if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "non-finite number in output");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string canonical_dump(const json& value) {
  std::string out;
  emit(value, 0, out);
  out += "\n";
  return out;
}

json model_to_json(const DecisionModel& m) {
  json doc = json::object();
  json attrs = json::array();
  for (const auto& a : m.attributes) {
    attrs.push_back({{"index", a.index},
                     {"name", a.name},
                     {"domain", {a.domain.lo, a.domain.hi}},
                     {"ref_zero", a.ref_zero},
                     {"ref_star", a.ref_star}});
  }
  doc["attributes"] = attrs;
  auto edges = [](const EdgeSet& es) {
    json arr = json::array();
    for (const auto& e : es) arr.push_back({e.from, e.to});
    return arr;
  };
  doc["prob_edges"] = edges(m.deun.prob_edges());
  doc["util_edges"] = edges(m.deun.util_edges());
  doc["decisions"] = m.decisions;

  json cpds = json::object();
  for (const auto& d : m.decisions) cpds[d] = json::object();
  for (int i = 1; i <= m.size(); ++i) {
    const auto& name = m.attribute(i).name;
    bool shared = m.decisions.size() >= 2;
    for (size_t d = 0; d < m.cpds.size() && shared; ++d) {
      shared = m.cpds[d][i - 1].has_value() && m.cpds[d][i - 1] == m.cpds[0][i - 1];
    }
    if (shared) {
      cpds["*"][name] = cpd_to_json(m, *m.cpds[0][i - 1]);
      continue;
    }
    for (size_t d = 0; d < m.cpds.size(); ++d) {
      if (m.cpds[d][i - 1]) cpds[m.decisions[d]][name] = cpd_to_json(m, *m.cpds[d][i - 1]);
    }
  }
  doc["cpds"] = cpds;

  json utils = json::object();
  for (int i = 1; i <= m.size(); ++i) {
    json per = json::object();
    const int width = static_cast<int>(m.deun.util_parents(i).size());
    for (std::uint64_t c = 0; c < m.utilities[i - 1].size(); ++c) {
      if (m.utilities[i - 1][c]) per[index_to_key(c, width)] = form_to_json(*m.utilities[i - 1][c]);
    }
    utils[m.attribute(i).name] = per;
  }
  doc["utilities"] = utils;

  json weights = json::object();
  for (std::uint64_t c = 0; c < m.corner_weights.size(); ++c) {
    if (m.corner_weights[c]) weights[index_to_key(c, m.size())] = *m.corner_weights[c];
  }
  doc["corner_weights"] = weights;
  return doc;
}

std::string serialize_model(const DecisionModel& model) {
  return canonical_dump(model_to_json(model));
}

}  // namespace deun
