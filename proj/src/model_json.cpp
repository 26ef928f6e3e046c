#include <fstream>
#include <sstream>

#include "tjk/io.hpp"

namespace tjk {

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
}

static std::string id_of(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw InputError("world ids must be strings or integers");
}

KripkeModel model_from_json(const json& j) {
  try {
    KripkeModel m;
    for (auto& w : j.at("worlds")) m.add_world(id_of(w));
    if (m.size() == 0) throw InputError("model has no worlds");
    for (std::size_t a = 0; a < m.world_ids.size(); ++a)
      for (std::size_t b = a + 1; b < m.world_ids.size(); ++b)
        if (m.world_ids[a] == m.world_ids[b]) throw InputError("duplicate world id " + m.world_ids[a]);
    if (j.contains("edges"))
      for (auto& e : j.at("edges")) {
        if (!e.is_array() || e.size() != 2) throw InputError("edges are [from, to] pairs");
        m.add_edge(m.world(id_of(e[0])), m.world(id_of(e[1])));
      }
    m.close_transitively();
    m.domain = j.at("domain").get<int>();
    if (m.domain < 1) throw InputError("domain must be positive");
    if (j.contains("identity")) m.identity = identity_mode_from_string(j.at("identity").get<std::string>());
    std::map<std::string, int> arities;
    if (j.contains("arities")) arities = j.at("arities").get<std::map<std::string, int>>();
    if (j.contains("consts"))
      for (auto& [c, v] : j.at("consts").items()) m.consts[c] = v.get<int>();
    if (j.contains("funs"))
      for (auto& [f, tab] : j.at("funs").items()) {
        FunInterp fi;
        fi.table = tab.get<std::vector<int>>();
        if (arities.count(f)) {
          fi.arity = arities[f];
        } else {
          fi.arity = 1;
          while (m.tuple_count(fi.arity) < fi.table.size()) ++fi.arity;
        }
        m.funs[f] = fi;
      }
    if (j.contains("rels"))
      for (auto& [r, per_world] : j.at("rels").items()) {
        RelInterp ri;
        ri.arity = -1;
        if (arities.count(r)) ri.arity = arities[r];
        for (auto& [w, tuples] : per_world.items())
          for (auto& t : tuples) {
            int a = static_cast<int>(t.size());
            if (ri.arity >= 0 && ri.arity != a) throw InputError("relation " + r + " has tuples of mixed arity");
            ri.arity = a;
          }
        if (ri.arity < 0) ri.arity = 0;
        ri.holds.assign(m.tuple_count(ri.arity), 0);
        for (auto& [w, tuples] : per_world.items()) {
          int wi = m.world(w);
          for (auto& t : tuples) {
            std::size_t idx = 0;
            for (auto& v : t) {
              int x = v.get<int>();
              if (x < 0 || x >= m.domain) throw InputError("relation " + r + " mentions an element outside the domain");
              idx = idx * m.domain + x;
            }
            ri.holds[idx] |= bit(wi);
          }
        }
        m.rels[r] = ri;
      }
    auto v = m.violations();
    if (!v.empty()) throw InputError("invalid model: " + v.front());
    return m;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed model: ") + e.what());
  } catch (const ModelError& e) {
    throw InputError(std::string("invalid model: ") + e.what());
  }
}

json model_to_json(const KripkeModel& m) {
  json j;
  j["worlds"] = m.world_ids;
  json edges = json::array();
  for (int w = 0; w < m.size(); ++w)
    for (int u = 0; u < m.size(); ++u)
      if (m.sees(w, u)) edges.push_back({m.world_ids[w], m.world_ids[u]});
  j["edges"] = edges;
  j["domain"] = m.domain;
  j["consts"] = m.consts;
  json funs = json::object(), rels = json::object(), arities = json::object();
  for (auto& [f, fi] : m.funs) {
    funs[f] = fi.table;
    arities[f] = fi.arity;
  }
  for (auto& [r, ri] : m.rels) {
    json per = json::object();
    for (int w = 0; w < m.size(); ++w) {
      json tuples = json::array();
      for (std::size_t t = 0; t < ri.holds.size(); ++t)
        if (ri.holds[t] & bit(w)) {
          json tup = json::array();
          std::vector<int> vals(ri.arity);
          std::size_t idx = t;
          for (int i = ri.arity - 1; i >= 0; --i) {
            vals[i] = static_cast<int>(idx % m.domain);
            idx /= m.domain;
          }
          for (int v : vals) tup.push_back(v);
          tuples.push_back(tup);
        }
      if (!tuples.empty()) per[m.world_ids[w]] = tuples;
    }
    rels[r] = per;
    arities[r] = ri.arity;
  }
  j["funs"] = funs;
  j["rels"] = rels;
  j["arities"] = arities;
  j["identity"] = to_string(m.identity);
  return j;
}

}  // namespace tjk
