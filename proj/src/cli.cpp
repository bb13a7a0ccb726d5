#include "deun/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iterator>
#include <numeric>
#include <ostream>
#include <sstream>

#include "deun/model_io.hpp"
#include "deun/oracle.hpp"

namespace deun {

using nlohmann::json;

namespace {

constexpr double kBoundsSlack = 1e-9;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string vertex_set(const std::vector<int>& vs) {
  std::string s = "{";
  for (size_t k = 0; k < vs.size(); ++k) s += (k ? "," : "") + std::to_string(vs[k]);
  return s + "}";
}

std::string names_of(const DecisionModel& m, const std::vector<int>& vs) {
  std::string s;
  for (size_t k = 0; k < vs.size(); ++k) s += (k ? "," : "") + m.attribute(vs[k]).name;
  return s;
}

std::string edge_list(const EdgeSet& es) {
  std::string s;
  for (const auto& e : es) {
    s += (s.empty() ? "" : " ") + ("(" + std::to_string(e.from) + "," + std::to_string(e.to) + ")");
  }
  return s.empty() ? "none" : s;
}

EdgeSet added_edges(const Deun& before, const Deun& after) {
  EdgeSet out;
  std::set_difference(after.prob_edges().begin(), after.prob_edges().end(),
                      before.prob_edges().begin(), before.prob_edges().end(),
                      std::inserter(out, out.end()));
  return out;
}

json edges_json(const EdgeSet& es) {
  json arr = json::array();
  for (const auto& e : es) arr.push_back({e.from, e.to});
  return arr;
}

// Left-aligned columns separated by two spaces.
std::string columns(const std::vector<std::vector<std::string>>& rows) {
  std::vector<size_t> width;
  for (const auto& r : rows) {
    width.resize(std::max(width.size(), r.size()), 0);
    for (size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
  }
  std::string out;
  for (const auto& r : rows) {
    std::string line;
    for (size_t c = 0; c < r.size(); ++c) {
      line += r[c];
      if (c + 1 < r.size()) line += std::string(width[c] - r[c].size() + 2, ' ');
    }
    out += line + "\n";
  }
  return out;
}

std::string witness_text(const DecomposabilityResult& r) {
  if (r.decomposable || !r.witness) return "yes";
  const auto& w = *r.witness;
  if (w.condition == DecomposabilityWitness::Condition::UnjoinedCoParents) {
    return "no (parents " + std::to_string(w.a) + " and " + std::to_string(w.b) + " of " +
           std::to_string(w.child) + " are not joined)";
  }
  return "no (utility edge (" + std::to_string(w.a) + "," + std::to_string(w.b) +
         ") has no probabilistic path)";
}

json issue_json(const Issue& i) {
  return {{"severity", i.severity == Issue::Severity::Error ? "error" : "warning"},
          {"kind", std::string(to_string(i.kind))},
          {"path", i.path},
          {"message", i.message}};
}

std::string report_text(const ValidationReport& report) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& i : report.issues) {
    rows.push_back({i.severity == Issue::Severity::Error ? "error" : "warning",
                    std::string(to_string(i.kind)), i.path, i.message});
  }
  return columns(rows);
}

std::vector<int> selected_decisions(const DecisionModel& m, const RunConfig& cfg) {
  if (cfg.decision) return {m.decision_index(*cfg.decision)};
  std::vector<int> all(m.decisions.size());
  std::iota(all.begin(), all.end(), 0);
  return all;
}

void check_bounds(double eu, const std::string& decision) {
  if (!std::isfinite(eu) || eu < -kBoundsSlack || eu > 1.0 + kBoundsSlack) {
    throw Error(ErrorKind::PendingVariable,
                "expected utility " + num(eu) + " of " + decision + " lies outside [0, 1]");
  }
}

struct Output {
  std::string text;
  int status = 0;
};

Output cmd_validate(const RunConfig& cfg) {
  auto parsed = read_model_document(read_text_file(cfg.model_path), cfg.model_path.string());
  const auto& m = parsed.model;
  const auto& r = parsed.report;
  const bool structural_ok =
      m.size() > 0 && check_deun(m.size(), m.deun.prob_edges(), m.deun.util_edges()).empty();
  const auto dec = structural_ok ? is_decomposable(m.deun) : DecomposabilityResult{false, {}};
  Output o;
  o.status = r.clean() ? 0 : 1;
  if (cfg.structured) {
    json issues = json::array();
    for (const auto& i : r.issues) issues.push_back(issue_json(i));
    json doc = {{"model", cfg.model_path.string()},
                {"clean", r.clean()},
                {"errors", r.error_count()},
                {"warnings", r.warning_count()},
                {"issues", issues}};
    if (structural_ok) doc["decomposable"] = dec.decomposable;
    o.text = canonical_dump(doc);
    return o;
  }
  std::ostringstream os;
  os << "model: " << cfg.model_path.string() << "\n";
  os << "attributes: " << m.size() << "  decisions: " << m.decisions.size()
     << "  probabilistic edges: " << m.deun.prob_edges().size()
     << "  utility edges: " << m.deun.util_edges().size() << "\n";
  if (structural_ok) os << "decomposable: " << witness_text(dec) << "\n";
  os << report_text(r);
  os << "result: " << (r.clean() ? "clean" : "invalid") << " (" << r.error_count()
     << " errors, " << r.warning_count() << " warnings)\n";
  o.text = os.str();
  return o;
}

Output cmd_decompose(const DecisionModel& m, std::ostream& err) {
  auto d = decompose_model(m);
  err << "added probabilistic edges: " << edge_list(added_edges(m.deun, d.deun)) << "\n";
  return {serialize_model(d), 0};
}

Output cmd_jtree(const RunConfig& cfg, const DecisionModel& model) {
  const bool decomposable = static_cast<bool>(is_decomposable(model.deun));
  const Deun deun = decomposable ? model.deun : make_decomposable(model.deun);
  const auto added = added_edges(model.deun, deun);
  const auto tree = build_junction_tree(deun);
  const auto& cs = tree.clique_set;
  auto label = [](int c) { return "C" + std::to_string(c + 1); };
  if (cfg.structured) {
    json cliques = json::array();
    for (int c = 0; c < cs.size(); ++c) {
      json parent = cs.rip_parent[c] ? json(*cs.rip_parent[c] + 1) : json(nullptr);
      cliques.push_back({{"id", c + 1},
                         {"vertices", cs.cliques[c]},
                         {"separator", cs.separators[c]},
                         {"parent", parent},
                         {"assigned", tree.assigned_vertices(c)}});
    }
    json edges = json::array();
    for (const auto& [p, ch] : tree.edges) edges.push_back({p + 1, ch + 1});
    json roots = json::array();
    for (int r : tree.roots()) roots.push_back(r + 1);
    return {canonical_dump({{"decomposable", decomposable},
                            {"added_prob_edges", edges_json(added)},
                            {"cliques", cliques},
                            {"tree_edges", edges},
                            {"roots", roots}}),
            0};
  }
  std::ostringstream os;
  os << "structure: "
     << (decomposable ? "decomposable"
                      : "not decomposable; tree of the decomposed structure (added probabilistic "
                        "edges: " + edge_list(added) + ")")
     << "\n";
  os << "cliques:\n";
  std::vector<std::vector<std::string>> rows;
  for (int c = 0; c < cs.size(); ++c) {
    rows.push_back({"  " + label(c), vertex_set(cs.cliques[c]), names_of(model, cs.cliques[c]),
                    "separator " + vertex_set(cs.separators[c]),
                    "parent " + (cs.rip_parent[c] ? label(*cs.rip_parent[c]) : std::string("-"))});
  }
  os << columns(rows);
  os << "tree edges:\n";
  if (tree.edges.empty()) os << "  none\n";
  for (const auto& [p, ch] : tree.edges) {
    os << "  " << label(p) << " " << vertex_set(cs.cliques[p]) << " -> " << label(ch) << " "
       << vertex_set(cs.cliques[ch]) << "\n";
  }
  os << "roots:";
  for (int r : tree.roots()) os << " " << label(r);
  os << "\nfamily assignment:\n";
  rows.clear();
  for (int v = 1; v <= model.size(); ++v) {
    rows.push_back({"  " + std::to_string(v), model.attribute(v).name,
                    "-> " + label(tree.family_assignment[v - 1])});
  }
  os << columns(rows);
  return {os.str(), 0};
}

std::string factor_text(const ExpansionFactor& f) {
  std::string s = f.disutility ? "û(y" : "u(y";
  s += std::to_string(f.attribute);
  if (f.parents.size() > 0) {
    s += "|";
    for (int k = 0; k < f.parents.size(); ++k) {
      const int p = f.parents.scope()[k];
      s += (k ? "," : "") + ("y" + std::to_string(p)) + (f.parents.is_star(p) ? "*" : "^0");
    }
  }
  return s + ")";
}

Output cmd_expand(const RunConfig& cfg, const DecisionModel& m) {
  const auto monomials = utility_expansion(m);
  const int n = m.size();
  if (cfg.structured) {
    json list = json::array();
    for (const auto& mono : monomials) {
      json factors = json::array();
      for (const auto& f : mono.factors) {
        factors.push_back({{"attribute", f.attribute},
                           {"kind", f.disutility ? "disutility" : "utility"},
                           {"parents", f.parents.key()}});
      }
      list.push_back({{"corner", mono.corner.key()}, {"weight", mono.weight}, {"factors", factors}});
    }
    return {canonical_dump({{"attributes", n},
                            {"monomials", list},
                            {"indeterminates_per_monomial", n + 1}}),
            0};
  }
  std::ostringstream os;
  os << "monomials: " << monomials.size() << " (" << n << " attributes, " << n + 1
     << " indeterminates each)\n";
  std::vector<std::vector<std::string>> rows;
  for (const auto& mono : monomials) {
    std::vector<int> stars;
    for (int a : mono.corner.scope()) {
      if (mono.corner.is_star(a)) stars.push_back(a);
    }
    std::string r = "r";
    for (int a : stars) r += std::to_string(a) + (n >= 10 ? "." : "");
    if (stars.empty()) r += "_0";
    std::string prod;
    for (const auto& f : mono.factors) prod += (prod.empty() ? "" : " ") + factor_text(f);
    rows.push_back({mono.corner.key(), r, num(mono.weight), prod});
  }
  os << columns(rows);
  return {os.str(), 0};
}

Method resolve_method(const RunConfig& cfg, const DecisionModel& m) {
  const Method method = cfg.method.value_or(default_method(m));
  if (method == Method::JunctionTree && !is_decomposable(m.deun)) {
    throw Error(ErrorKind::NotDecomposable,
                "the junction-tree method needs a decomposable model; run `decompose` first or "
                "use --method theorem1");
  }
  return method;
}

Output cmd_evaluate(const RunConfig& cfg, const DecisionModel& m, bool ranked) {
  const Method method = resolve_method(cfg, m);
  std::vector<RankedDecision> results;
  if (ranked) {
    results = rank_decisions(m, method);
  } else {
    for (int d : selected_decisions(m, cfg)) {
      results.push_back({m.decisions[d], expected_utility(m, d, method)});
    }
  }
  for (const auto& r : results) check_bounds(r.eu, r.decision);
  if (cfg.structured) {
    json list = json::array();
    for (size_t k = 0; k < results.size(); ++k) {
      json row = {{"decision", results[k].decision}, {"expected_utility", results[k].eu}};
      if (ranked) row["rank"] = k + 1;
      list.push_back(row);
    }
    json doc = {{"method", std::string(to_string(method))}, {"results", list}};
    if (ranked && !results.empty()) doc["optimal"] = results.front().decision;
    return {canonical_dump(doc), 0};
  }
  std::ostringstream os;
  os << "method: " << to_string(method) << "\n";
  std::vector<std::vector<std::string>> rows;
  if (ranked) {
    rows.push_back({"rank", "decision", "expected_utility"});
    for (size_t k = 0; k < results.size(); ++k) {
      rows.push_back({std::to_string(k + 1), results[k].decision, num(results[k].eu)});
    }
  } else {
    rows.push_back({"decision", "expected_utility"});
    for (const auto& r : results) rows.push_back({r.decision, num(r.eu)});
  }
  os << columns(rows);
  if (ranked && !results.empty()) os << "optimal: " << results.front().decision << "\n";
  return {os.str(), 0};
}

bool all_tabular(const DecisionModel& m, int d) {
  for (int i = 1; i <= m.size(); ++i) {
    if (!is_tabular(m.cpd(d, i))) return false;
  }
  return true;
}

Output cmd_oracle(const RunConfig& cfg, const DecisionModel& m) {
  if (!cfg.mc_samples || *cfg.mc_samples == 0) {
    throw Error(ErrorKind::ValidationError, "oracle needs --mc-samples N with N > 0");
  }
  const Method method = resolve_method(cfg, m);
  McOptions opts{*cfg.mc_samples, cfg.seed, cfg.clamp};
  struct Row {
    std::string decision;
    double closed;
    McReport mc;
    std::optional<double> exact;
  };
  std::vector<Row> rows;
  for (int d : selected_decisions(m, cfg)) {
    const double closed = expected_utility(m, d, method);
    check_bounds(closed, m.decisions[d]);
    std::optional<double> exact;
    if (all_tabular(m, d)) exact = exact_discrete_eu(m, d);
    rows.push_back({m.decisions[d], closed, monte_carlo_eu(m, d, opts), exact});
  }
  auto z_of = [](const Row& r) {
    return r.mc.std_error > 0.0 ? (r.mc.estimate - r.closed) / r.mc.std_error : 0.0;
  };
  if (cfg.structured) {
    json list = json::array();
    for (const auto& r : rows) {
      json row = {{"decision", r.decision},
                  {"closed_form", r.closed},
                  {"mc_estimate", r.mc.estimate},
                  {"std_error", r.mc.std_error},
                  {"z", z_of(r)},
                  {"out_of_domain_fraction", r.mc.out_of_domain_fraction}};
      if (r.exact) row["exact"] = *r.exact;
      list.push_back(row);
    }
    return {canonical_dump({{"method", std::string(to_string(method))},
                            {"samples", opts.samples},
                            {"seed", opts.seed},
                            {"rng", kRngAlgorithm},
                            {"clamp", opts.clamp},
                            {"results", list}}),
            0};
  }
  std::ostringstream os;
  os << "method: " << to_string(method) << "  samples: " << opts.samples
     << "  seed: " << opts.seed << "  rng: " << kRngAlgorithm
     << "  clamp: " << (opts.clamp ? "on" : "off") << "\n";
  std::vector<std::vector<std::string>> table = {
      {"decision", "closed_form", "mc_estimate", "std_error", "z", "out_of_domain"}};
  const bool any_exact = std::any_of(rows.begin(), rows.end(), [](const Row& r) { return r.exact; });
  if (any_exact) table[0].push_back("exact");
  for (const auto& r : rows) {
    table.push_back({r.decision, num(r.closed), num(r.mc.estimate), num(r.mc.std_error),
                     num(z_of(r)), num(r.mc.out_of_domain_fraction)});
    if (any_exact) table.back().push_back(r.exact ? num(*r.exact) : "-");
  }
  os << columns(table);
  return {os.str(), 0};
}

void emit(const RunConfig& cfg, const std::string& text, std::ostream& out) {
  if (cfg.output_path) {
    write_text_file(*cfg.output_path, text);
  } else {
    out << text;
  }
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (std::find(kCommands.begin(), kCommands.end(), cfg.command) == kCommands.end()) {
      throw Error(ErrorKind::InvalidArgument, "unknown command '" + cfg.command + "'");
    }
    Output o;
    if (cfg.command == "validate") {
      o = cmd_validate(cfg);
    } else {
      const auto model = parse_model(cfg.model_path);
      if (cfg.command == "decompose") o = cmd_decompose(model, err);
      else if (cfg.command == "jtree") o = cmd_jtree(cfg, model);
      else if (cfg.command == "expand") o = cmd_expand(cfg, model);
      else if (cfg.command == "evaluate") o = cmd_evaluate(cfg, model, false);
      else if (cfg.command == "rank") o = cmd_evaluate(cfg, model, true);
      else o = cmd_oracle(cfg, model);
    }
    emit(cfg, o.text, out);
    return o.status;
  } catch (const ModelValidationError& e) {
    err << "invalid model " << cfg.model_path.string() << "\n" << report_text(e.report());
    return exit_code(e.kind());
  } catch (const Error& e) {
    err << "error [" << to_string(e.kind()) << "]: " << e.what() << "\n";
    return exit_code(e.kind());
  }
}

}  // namespace deun
