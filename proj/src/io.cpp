#include "relcd/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace relcd::io {

json to_json(const Schema& s) {
  json j;
  j["entities"] = s.entities();
  j["relationships"] = json::array();
  for (const auto& r : s.relationships()) {
    json parts = json::array();
    for (const auto& p : r.participants) parts.push_back({{"entity", p.entity}, {"cardinality", to_string(p.cardinality)}});
    j["relationships"].push_back({{"id", r.id}, {"participants", parts}});
  }
  j["attributes"] = json::array();
  for (const auto& a : s.attributes()) j["attributes"].push_back({{"id", a.id}, {"owner", a.owner}});
  return j;
}

Schema schema_from_json(const json& j) {
  try {
    std::vector<std::string> ents = j.at("entities").get<std::vector<std::string>>();
    std::vector<RelationshipClass> rels;
    for (const auto& r : j.at("relationships")) {
      RelationshipClass rc{r.at("id").get<std::string>(), {}};
      for (const auto& p : r.at("participants"))
        rc.participants.push_back(
            {p.at("entity").get<std::string>(), cardinality_from_string(p.at("cardinality").get<std::string>())});
      rels.push_back(std::move(rc));
    }
    std::vector<AttributeClass> attrs;
    for (const auto& a : j.at("attributes")) attrs.push_back({a.at("id").get<std::string>(), a.at("owner").get<std::string>()});
    Schema s(std::move(ents), std::move(rels), std::move(attrs));
    if (auto v = validate_schema(s); !v.empty()) throw FormatError("invalid schema: " + v.front());
    return s;
  } catch (const json::exception& e) {
    throw FormatError(std::string("schema.json: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("schema.json: ") + e.what());
  }
}

json to_json(const Skeleton& sk) {
  json j;
  j["items"] = json::array();
  j["relationships"] = json::array();
  for (ItemIndex i = 0; i < static_cast<ItemIndex>(sk.size()); ++i) {
    const auto& it = sk.item(i);
    j["items"].push_back({{"id", it.id}, {"class", it.cls}});
    if (sk.schema().is_relationship(it.cls)) {
      json parts = json::array();
      for (ItemIndex p : sk.participants(i)) parts.push_back(sk.id(p));
      j["relationships"].push_back({{"id", it.id}, {"class", it.cls}, {"participants", parts}});
    }
  }
  return j;
}

Skeleton skeleton_from_json(const Schema& s, const json& j) {
  try {
    Skeleton::Builder b(s);
    std::map<std::string, const json*> rels;
    for (const auto& r : j.at("relationships")) rels[r.at("id").get<std::string>()] = &r;
    for (const auto& it : j.at("items")) {
      auto id = it.at("id").get<std::string>();
      auto cls = it.at("class").get<std::string>();
      if (s.is_relationship(cls)) {
        auto found = rels.find(id);
        if (found == rels.end()) throw FormatError("skeleton.json: relationship item " + id + " lacks participants");
        b.add_relationship(id, cls, found->second->at("participants").get<std::vector<std::string>>());
        rels.erase(found);
      } else {
        b.add_entity(id, cls);
      }
    }
    for (const auto& [id, r] : rels) b.add_relationship(id, r->at("class").get<std::string>(), r->at("participants").get<std::vector<std::string>>());
    return std::move(b).build();
  } catch (const json::exception& e) {
    throw FormatError(std::string("skeleton.json: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("skeleton.json: ") + e.what());
  }
}

json to_json(const Model& m) {
  json j;
  j["hop_threshold"] = m.hop_threshold();
  j["deps"] = json::array();
  for (const auto& d : m.dependencies())
    j["deps"].push_back({{"cause_path", d.cause.path.classes},
                         {"cause_attr", d.cause.attr},
                         {"effect_attr", d.effect},
                         {"directed", d.directed}});
  j["h_edges"] = json::array();
  const auto& h = m.graph();
  for (const auto& [a, b] : h.edges()) {
    if (h.has_directed(b, a))
      j["h_edges"].push_back({{"from", b}, {"to", a}, {"directed", true}});
    else
      j["h_edges"].push_back({{"from", a}, {"to", b}, {"directed", h.has_directed(a, b)}});
  }
  j["non_colliders"] = json::array();
  for (const auto& t : m.non_colliders()) j["non_colliders"].push_back(t);
  return j;
}

Model model_from_json(const Schema& s, const json& j) {
  try {
    std::vector<RelationalDependency> deps;
    for (const auto& d : j.at("deps")) {
      RelationalDependency dep;
      dep.cause.path = RelationalPath(d.at("cause_path").get<std::vector<std::string>>());
      dep.cause.attr = d.at("cause_attr").get<std::string>();
      dep.effect = d.at("effect_attr").get<std::string>();
      dep.directed = d.at("directed").get<bool>();
      deps.push_back(std::move(dep));
    }
    Model m = Model::from_dependencies(s, deps, j.value("hop_threshold", 0));
    if (j.contains("h_edges")) {
      for (const auto& e : j.at("h_edges")) {
        auto from = e.at("from").get<std::string>();
        auto to = e.at("to").get<std::string>();
        if (!m.graph().adjacent(from, to)) throw FormatError("model.json: h edge " + from + "-" + to + " has no dependency");
        if (e.at("directed").get<bool>()) {
          if (m.graph().has_directed(to, from)) throw FormatError("model.json: h edge " + from + "->" + to + " conflicts with deps");
          m.graph().orient(from, to);
        }
      }
    }
    if (j.contains("non_colliders"))
      for (const auto& t : j.at("non_colliders")) m.non_colliders().insert(t.get<AttrTriple>());
    return m;
  } catch (const json::exception& e) {
    throw FormatError(std::string("model.json: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("model.json: ") + e.what());
  }
}

json to_json(const LinearGaussianParams& p) {
  json j;
  j["noise_sd"] = p.noise_sd;
  j["coeff_sd"] = p.coeff_sd;
  j["beta"] = json::array();
  for (const auto& [d, v] : p.beta)
    j["beta"].push_back({{"cause_path", d.cause.path.classes}, {"cause_attr", d.cause.attr}, {"effect_attr", d.effect}, {"value", v}});
  return j;
}

LinearGaussianParams params_from_json(const json& j) {
  try {
    LinearGaussianParams p;
    p.noise_sd = j.at("noise_sd").get<double>();
    p.coeff_sd = j.at("coeff_sd").get<double>();
    for (const auto& b : j.at("beta")) {
      RelationalDependency d{{RelationalPath(b.at("cause_path").get<std::vector<std::string>>()), b.at("cause_attr").get<std::string>()},
                             b.at("effect_attr").get<std::string>(), true};
      p.beta[d] = b.at("value").get<double>();
    }
    return p;
  } catch (const json::exception& e) {
    throw FormatError(std::string("params.json: ") + e.what());
  }
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, end);
}

void write_data_csv(std::ostream& os, const Skeleton& sk, const AttrData& data) {
  os << "item_id,attribute,value\n";
  const auto& s = sk.schema();
  for (ItemIndex i = 0; i < static_cast<ItemIndex>(sk.size()); ++i)
    for (const auto& a : s.attributes_of(sk.item(i).cls)) {
      const double v = data.get(i, a);
      if (std::isnan(v)) continue;
      os << sk.id(i) << ',' << a << ',' << format_double(v) << '\n';
    }
}

AttrData read_data_csv(std::istream& is, const Skeleton& sk) {
  AttrData data(sk);
  std::string line;
  if (!std::getline(is, line) || line.rfind("item_id,attribute,value", 0) != 0)
    throw FormatError("data.csv: missing header 'item_id,attribute,value'");
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto c1 = line.find(',');
    auto c2 = line.find(',', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw FormatError("data.csv:" + std::to_string(lineno) + ": expected three fields");
    const std::string id = line.substr(0, c1), attr = line.substr(c1 + 1, c2 - c1 - 1), val = line.substr(c2 + 1);
    auto item = sk.find(id);
    if (!item) throw FormatError("data.csv:" + std::to_string(lineno) + ": unknown item " + id);
    if (!sk.schema().has_attribute(attr) || sk.schema().owner(attr) != sk.item(*item).cls)
      throw FormatError("data.csv:" + std::to_string(lineno) + ": attribute " + attr + " not owned by " + id);
    double v = 0;
    auto [p, ec] = std::from_chars(val.data(), val.data() + val.size(), v);
    if (ec != std::errc() || p != val.data() + val.size())
      throw FormatError("data.csv:" + std::to_string(lineno) + ": bad value '" + val + "'");
    data.set(*item, attr, v);
  }
  const auto& s = sk.schema();
  for (ItemIndex i = 0; i < static_cast<ItemIndex>(sk.size()); ++i)
    for (const auto& a : s.attributes_of(sk.item(i).cls))
      if (std::isnan(data.get(i, a))) throw FormatError("data.csv: missing value for " + sk.id(i) + "." + a);
  return data;
}

void write_ground_graph_csv(std::ostream& os, const Skeleton& sk, const GroundGraph& gg) {
  os << "src,dst\n";
  for (const auto& [a, b] : gg.edges()) os << gg.label(sk, a) << ',' << gg.label(sk, b) << '\n';
}

json read_json_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw FormatError("cannot read " + p.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(p.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& p, const std::string& content) {
  auto tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, p);
}

std::string read_text_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw FormatError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_flat_csv(std::ostream& os, const Skeleton& sk, const FlatTable& t) {
  os << "item_id";
  for (const auto& c : t.columns) os << ',' << c.to_string();
  os << "\n";
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    os << sk.id(t.rows[r]);
    for (const auto& col : t.cells) {
      os << ',';
      for (std::size_t k = 0; k < col[r].size(); ++k) os << (k ? "|" : "") << format_double(col[r][k]);
    }
    os << "\n";
  }
}

namespace {

json var_json(const RelationalVariable& v) { return {{"path", v.path.classes}, {"attr", v.attr}}; }

RelationalVariable var_from(const json& j) {
  return {RelationalPath(j.at("path").get<std::vector<std::string>>()), j.at("attr").get<std::string>()};
}

json vars_json(const std::vector<RelationalVariable>& vs) {
  json a = json::array();
  for (const auto& v : vs) a.push_back(var_json(v));
  return a;
}

std::vector<RelationalVariable> vars_from(const json& j) {
  std::vector<RelationalVariable> out;
  for (const auto& v : j) out.push_back(var_from(v));
  return out;
}

VerdictKind kind_from(const std::string& s) {
  if (s == "collider") return VerdictKind::Collider;
  if (s == "non_collider") return VerdictKind::NonCollider;
  if (s == "weak") return VerdictKind::Weak;
  throw FormatError("report.json: unknown verdict '" + s + "'");
}

}  // namespace

json to_json(const RunReport& r) {
  json j;
  j["queries"] = json::array();
  for (const auto& q : r.queries)
    j["queries"].push_back({{"U", q.u},
                            {"V", q.v},
                            {"W", q.w},
                            {"p_value", q.p_value},
                            {"decision", q.independent ? "independent" : "dependent"},
                            {"aggregated", q.aggregated},
                            {"phase", q.phase},
                            {"provenance", q.provenance},
                            {"error", q.error},
                            {"note", q.note}});
  j["sepsets"] = json::array();
  for (const auto& s : r.sepsets)
    j["sepsets"].push_back({{"U", var_json(s.u)}, {"V", var_json(s.v)}, {"S", vars_json(s.sepset)}, {"phase", s.phase}});
  j["verdicts"] = json::array();
  for (const auto& v : r.verdicts)
    j["verdicts"].push_back({{"triple", v.triple},
                             {"kind", to_string(v.kind)},
                             {"family", v.family},
                             {"S", vars_json(v.sepset)},
                             {"context", v.context},
                             {"first", v.first}});
  j["log"] = r.log;
  j["timings"] = json::object();
  for (const auto& [k, t] : r.timings) j["timings"][k] = t;
  return j;
}

RunReport report_from_json(const json& j) {
  try {
    RunReport r;
    for (const auto& q : j.at("queries")) {
      QueryRecord rec;
      rec.u = q.at("U").get<std::string>();
      rec.v = q.at("V").get<std::string>();
      rec.w = q.at("W").get<std::vector<std::string>>();
      rec.p_value = q.at("p_value").get<double>();
      rec.independent = q.at("decision").get<std::string>() == "independent";
      rec.aggregated = q.at("aggregated").get<bool>();
      rec.phase = q.at("phase").get<int>();
      rec.provenance = q.at("provenance").get<std::string>();
      rec.error = q.value("error", false);
      rec.note = q.value("note", "");
      r.queries.push_back(std::move(rec));
    }
    for (const auto& s : j.at("sepsets"))
      r.sepsets.push_back({var_from(s.at("U")), var_from(s.at("V")), vars_from(s.at("S")), s.at("phase").get<int>()});
    for (const auto& v : j.at("verdicts"))
      r.verdicts.push_back({v.at("triple").get<AttrTriple>(), kind_from(v.at("kind").get<std::string>()),
                            v.at("family").get<std::string>(), vars_from(v.at("S")), v.at("context").get<std::string>(),
                            v.at("first").get<bool>()});
    r.log = j.at("log").get<std::vector<std::string>>();
    for (const auto& [k, t] : j.at("timings").items()) r.timings[k] = t.get<double>();
    return r;
  } catch (const json::exception& e) {
    throw FormatError(std::string("report.json: ") + e.what());
  }
}

}  // namespace relcd::io
