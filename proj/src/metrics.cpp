#include "pdcfa/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>
#include <unordered_set>

#include "json.hpp"

namespace pdcfa {

using ojson = nlohmann::ordered_json;

SingletonTable singleton_count(const Session& s, const AnalysisResult& r) {
  const Interner& in = s.interner();
  std::vector<Var> binders = s.program().binders();
  // Flow sets come from the bindings transitions made when available, so
  // that a binding collected right away still counts.
  std::vector<std::set<ValId>> flows(s.program().vars().size());

  auto scan = [&](StoreId st) {
    for (const auto& [a, vs] : in.store(st)) {
      auto& dst = flows[in.addr(a).var.value];
      for (ValId v : in.valset(vs)) dst.insert(v);
    }
  };
  if (r.bindings) {
    scan(*r.bindings);
  } else if (r.global_store) {
    scan(*r.global_store);
  } else {
    std::unordered_set<StoreId> seen;
    for (const auto& n : r.nodes) {
      StoreId st = in.state(n.state).store;
      if (seen.insert(st).second) scan(st);
    }
  }

  SingletonTable t;
  for (Var v : binders) {
    std::size_t n = flows[v.value].size();
    t.rows.push_back({v, n});
    if (n == 1) ++t.singletons;
  }
  return t;
}

std::string_view gc_mode(AnalysisKind k) {
  switch (k) {
    case AnalysisKind::PlainGc:
    case AnalysisKind::PdcfaGc: return "precise";
    case AnalysisKind::PdcfaGcApprox: return "approx";
    default: return "none";
  }
}

Metrics measure(const Session& s, const AnalysisResult& r, std::string program, unsigned k) {
  Metrics m;
  m.program = std::move(program);
  m.kind = r.kind;
  m.k = k;
  m.control_states = r.nodes.size();
  m.edges = r.edges.size();
  SingletonTable t = singleton_count(s, r);
  m.singleton_vars = t.singletons;
  m.variables_total = t.rows.size();
  m.wall_time_ms = r.wall_time_ms;
  m.saturated = r.saturated;
  return m;
}

std::string summary_header() {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-12s %-16s %2s %-8s %9s %9s %11s %10s %s", "program", "analysis",
                "k", "gc", "states", "edges", "singletons", "ms", "saturated");
  return buf;
}

std::string summary_line(const Metrics& m) {
  char buf[200];
  std::string single = std::to_string(m.singleton_vars) + "/" + std::to_string(m.variables_total);
  std::snprintf(buf, sizeof buf, "%-12s %-16s %2u %-8s %9zu %9zu %11s %10.2f %s", m.program.c_str(),
                std::string(analysis_name(m.kind)).c_str(), m.k,
                std::string(gc_mode(m.kind)).c_str(), m.control_states, m.edges, single.c_str(),
                m.wall_time_ms, m.saturated ? "yes" : "no");
  return buf;
}

namespace {

ojson metrics_json(const Metrics& m) {
  ojson j;
  j["schema"] = 1;
  j["program"] = m.program;
  j["analysis"] = analysis_name(m.kind);
  j["k"] = m.k;
  j["gc"] = gc_mode(m.kind);
  j["control_states"] = m.control_states;
  j["edges"] = m.edges;
  j["singleton_vars"] = m.singleton_vars;
  j["variables_total"] = m.variables_total;
  j["wall_time_ms"] = m.wall_time_ms;
  j["saturated"] = m.saturated;
  return j;
}

std::string act_kind(const StackAct<FrameId>& a) {
  if (a.is_push()) return "push";
  if (a.is_pop()) return "pop";
  return "eps";
}

std::string ctx_text(const Interner& in, CtxId c) {
  std::string s;
  for (Label l : in.ctx(c)) s += (s.empty() ? "" : ",") + std::to_string(l);
  return s;
}

std::string node_label(const Session& s, const AnalysisResult& r, const ResultNode& n) {
  const Interner& in = s.interner();
  const ControlState& q = in.state(n.state);
  std::string label = "L" + std::to_string(q.exp->label) + " " + std::string(exp_kind_name(*q.exp));
  if (!in.ctx(q.ctx).empty()) label += " [" + ctx_text(in, q.ctx) + "]";
  if (!is_pushdown(r.kind))
    label += n.kaddr.label == kNoLabel ? " k=halt" : " k=L" + std::to_string(n.kaddr.label);
  if (uses_gc(r.kind) && is_pushdown(r.kind))
    label += " R=" + std::to_string(in.roots(n.roots).size());
  return label;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string to_json(const Metrics& m) { return metrics_json(m).dump(2); }

std::string to_json(const Session& s, const AnalysisResult& r, const Metrics& m) {
  const Interner& in = s.interner();
  const AbstractMachine& am = s.machine();
  ojson j = metrics_json(m);
  j["policy"] = r.policy.name();
  j["program_hash"] = r.program_hash;
  j["rounds"] = r.rounds;
  j["stale_edges"] = r.stale_edges;

  ojson nodes = ojson::array();
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    const ResultNode& n = r.nodes[i];
    const ControlState& q = in.state(n.state);
    ojson node;
    node["id"] = i;
    node["exp"] = q.exp->label;
    node["kind"] = exp_kind_name(*q.exp);
    ojson env = ojson::object();
    for (const auto& [v, a] : in.env(q.env)) env[s.program().vars().unique_name(v)] = am.show_addr(a);
    node["env"] = env;
    node["ctx"] = in.ctx(q.ctx);
    node["store_size"] = in.store(q.store).size();
    if (uses_gc(r.kind) && is_pushdown(r.kind)) node["roots"] = in.roots(n.roots).size();
    if (!is_pushdown(r.kind))
      node["kaddr"] = n.kaddr.label == kNoLabel ? ojson(nullptr) : ojson(n.kaddr.label);
    nodes.push_back(std::move(node));
  }
  j["nodes"] = std::move(nodes);

  ojson edges = ojson::array();
  for (const auto& e : r.edges) {
    ojson edge;
    edge["src"] = e.src;
    edge["dst"] = e.dst;
    edge["act"] = act_kind(e.act);
    if (!e.act.is_unch()) edge["frame"] = am.show_frame(e.act.frame);
    if (e.guard) edge["guard"] = in.roots(*e.guard).size();
    edges.push_back(std::move(edge));
  }
  j["edges_list"] = std::move(edges);

  SingletonTable t = singleton_count(s, r);
  ojson flows = ojson::object();
  for (const auto& row : t.rows) flows[s.program().vars().unique_name(row.var)] = row.values;
  j["flow_set_sizes"] = std::move(flows);
  return j.dump(2);
}

std::string to_dot(const Session& s, const AnalysisResult& r) {
  const AbstractMachine& am = s.machine();
  const Interner& in = s.interner();
  std::ostringstream out;
  out << "digraph \"" << analysis_name(r.kind) << "\" {\n";
  out << "  node [shape=box, fontname=\"monospace\"];\n";
  for (std::size_t i = 0; i < r.nodes.size(); ++i)
    out << "  n" << i << " [label=\"" << escape(node_label(s, r, r.nodes[i])) << "\"];\n";
  for (const auto& e : r.edges) {
    std::string label;
    if (e.act.is_push())
      label = "push " + am.show_frame(e.act.frame);
    else if (e.act.is_pop())
      label = "pop " + am.show_frame(e.act.frame);
    else
      label = "eps";
    if (e.guard) label += " g=" + std::to_string(in.roots(*e.guard).size());
    out << "  n" << e.src << " -> n" << e.dst << " [label=\"" << escape(label) << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

std::vector<BenchmarkEntry> benchmark_corpus(const std::string& dir) {
  auto at = [&](const char* f) { return dir + "/" + f; };
  return {
      {"fig1", at("fig1.scm"), concrete::kDefaultFuel, {"toy"}},
      {"mj09", at("mj09.scm"), concrete::kDefaultFuel, {"return-flow"}},
      {"eta", at("eta.scm"), concrete::kDefaultFuel, {"idiom"}},
      {"kcfa2", at("kcfa2.scm"), concrete::kDefaultFuel, {"worst-case"}},
      {"kcfa3", at("kcfa3.scm"), concrete::kDefaultFuel, {"worst-case"}},
      {"blur", at("blur.scm"), concrete::kDefaultFuel, {"idiom"}},
      {"loop2", at("loop2.scm"), concrete::kDefaultFuel, {"gc"}},
      {"sat", at("sat.scm"), concrete::kDefaultFuel, {"backtracking"}},
  };
}

}  // namespace pdcfa
