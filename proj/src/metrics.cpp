#include <set>
#include <stdexcept>

#include "relcd/bench.hpp"

namespace relcd {

Metrics metrics_from_counts(const Counts& c) {
  Metrics m;
  const long pred = c.tp + c.fp, truth = c.tp + c.fn;
  m.precision_undefined = pred == 0;
  m.recall_undefined = truth == 0;
  m.precision = pred ? static_cast<double>(c.tp) / pred : 0.0;
  m.recall = truth ? static_cast<double>(c.tp) / truth : 0.0;
  m.f_measure = m.precision + m.recall > 0 ? 2 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  return m;
}

namespace {

Counts compare(const std::set<RelationalDependency>& learned, const std::set<RelationalDependency>& truth) {
  Counts c;
  for (const auto& d : learned) (truth.count(d) ? c.tp : c.fp)++;
  for (const auto& d : truth)
    if (!learned.count(d)) c.fn++;
  return c;
}

std::set<RelationalDependency> undirected(const Model& m) { return {m.adjacencies().begin(), m.adjacencies().end()}; }

std::set<RelationalDependency> directed(const Model& m) {
  const auto d = m.directed_dependencies();
  return {d.begin(), d.end()};
}

bool truly_collider(const AttributeGraph& g, const AttrTriple& t) {
  if (t[0] == t[2]) return g.has_directed(t[0], t[1]);
  return g.has_directed(t[0], t[1]) && g.has_directed(t[2], t[1]);
}

}  // namespace

Evaluation evaluate(const Model& learned, const Model& truth_rcm, const Model& truth_cprcm) {
  if (!(learned.schema() == truth_rcm.schema()) || !(truth_rcm.schema() == truth_cprcm.schema()))
    throw std::invalid_argument("evaluate: models use different schemas");
  Evaluation e;
  e.phase1 = compare(undirected(learned), undirected(truth_rcm));
  e.phase2 = compare(directed(learned), directed(truth_cprcm));
  return e;
}

Metrics micro_average(const std::vector<Counts>& per_model) {
  Counts sum;
  for (const auto& c : per_model) sum += c;
  return metrics_from_counts(sum);
}

Metrics macro_average(const std::vector<Counts>& per_model) {
  Metrics out;
  if (per_model.empty()) {
    out.precision_undefined = out.recall_undefined = true;
    return out;
  }
  for (const auto& c : per_model) {
    const Metrics m = metrics_from_counts(c);
    out.precision += m.precision;
    out.recall += m.recall;
    out.f_measure += m.f_measure;
    out.precision_undefined |= m.precision_undefined;
    out.recall_undefined |= m.recall_undefined;
  }
  const double n = static_cast<double>(per_model.size());
  out.precision /= n;
  out.recall /= n;
  out.f_measure /= n;
  return out;
}

VerdictAccuracy& VerdictAccuracy::operator+=(const VerdictAccuracy& o) {
  collider_correct += o.collider_correct;
  collider_total += o.collider_total;
  non_collider_correct += o.non_collider_correct;
  non_collider_total += o.non_collider_total;
  return *this;
}

double VerdictAccuracy::overall() const {
  const long n = collider_total + non_collider_total;
  return n ? static_cast<double>(collider_correct + non_collider_correct) / n : 0.0;
}
double VerdictAccuracy::collider() const {
  return collider_total ? static_cast<double>(collider_correct) / collider_total : 0.0;
}
double VerdictAccuracy::non_collider() const {
  return non_collider_total ? static_cast<double>(non_collider_correct) / non_collider_total : 0.0;
}

VerdictAccuracy verdict_accuracy(const std::vector<Verdict>& verdicts, const Model& truth_rcm,
                                 const std::function<bool(const Verdict&)>& family, bool weak_as_collider) {
  VerdictAccuracy a;
  for (const auto& v : verdicts) {
    if (!v.first || !family(v)) continue;
    if (v.kind == VerdictKind::Weak && !weak_as_collider) continue;
    const bool said_collider = v.kind != VerdictKind::NonCollider;
    if (truly_collider(truth_rcm.graph(), v.triple)) {
      a.collider_total++;
      a.collider_correct += said_collider;
    } else {
      a.non_collider_total++;
      a.non_collider_correct += !said_collider;
    }
  }
  return a;
}

}  // namespace relcd
