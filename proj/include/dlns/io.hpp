#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dlns/errors.hpp"
#include "dlns/instance.hpp"

namespace dlns {

namespace detail {

using nlohmann::json;

inline json utility_to_json(Utility u) {
  if (u.is_neg_inf()) return "-inf";
  double v = u.value();
  if (v == std::floor(v) && std::abs(v) < 9e15) return static_cast<long long>(v);
  return v;
}

// Field access with the JSON path of the failure in the error message.
class Reader {
public:
  explicit Reader(std::string path) : path_(std::move(path)) {}

  const json& field(const json& obj, const std::string& key) const {
    if (!obj.is_object()) fail("expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError("missing field " + path_ + "." + key);
    return *it;
  }

  int integer(const json& j) const {
    if (!j.is_number_integer()) fail("expected an integer");
    return j.get<int>();
  }

  const json& array(const json& j) const {
    if (!j.is_array()) fail("expected an array");
    return j;
  }

  Utility utility(const json& j) const {
    if (j.is_string() && j.get<std::string>() == "-inf") return kNegInf;
    if (!j.is_number()) fail("expected a number or \"-inf\"");
    double v = j.get<double>();
    if (!std::isfinite(v)) fail("utility must be finite or \"-inf\"");
    return v;
  }

  Reader at(const std::string& key) const { return Reader(path_ + "." + key); }
  Reader at(std::size_t i) const { return Reader(path_ + "[" + std::to_string(i) + "]"); }
  const std::string& path() const noexcept { return path_; }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError("field " + path_ + ": " + what); }

private:
  std::string path_;
};

}  // namespace detail

/// Writes the instance as JSON with one variable, agent, function or meeting
/// per line, so that files diff cleanly and re-serialize byte for byte.
inline void write_instance(std::ostream& os, const Instance& inst) {
  using nlohmann::json;
  json prov = inst.provenance().empty() ? json::object() : json::parse(inst.provenance());
  os << "{\n\"provenance\": " << prov.dump() << ",\n\"variables\": [";
  for (VarIndex v = 0; v < inst.num_variables(); ++v) {
    const auto& var = inst.variable(v);
    os << (v ? ",\n" : "\n") << json{{"id", var.id}, {"domain", var.domain}}.dump();
  }
  os << "\n],\n\"agents\": [";
  for (VarIndex v = 0; v < inst.num_variables(); ++v) {
    os << (v ? ",\n" : "\n") << json{{"id", inst.agent_of(v)}, {"owns", {inst.variable(v).id}}}.dump();
  }
  os << "\n],\n\"functions\": [";
  for (FuncIndex f = 0; f < inst.num_functions(); ++f) {
    const auto& fn = inst.function(f);
    const auto& da = inst.variable(fn.first()).domain;
    const auto& db = inst.variable(fn.second()).domain;
    json table = json::array();
    for (std::size_t i = 0; i < da.size(); ++i) {
      for (std::size_t j = 0; j < db.size(); ++j) table.push_back({da[i], db[j], detail::utility_to_json(fn.at(i, j))});
    }
    json obj = {{"id", fn.id()}, {"scope", {inst.variable(fn.first()).id, inst.variable(fn.second()).id}}, {"table", table}};
    os << (f ? ",\n" : "\n") << obj.dump();
  }
  os << "\n]";
  if (inst.meetings()) {
    os << ",\n\"meetings\": [";
    for (VarIndex v = 0; v < inst.num_variables(); ++v) {
      const auto& m = (*inst.meetings())[v];
      json obj = {{"variable", inst.variable(v).id}, {"duration", m.duration}, {"participants", m.participants}};
      os << (v ? ",\n" : "\n") << obj.dump();
    }
    os << "\n]";
  }
  os << "\n}\n";
}

inline std::string to_json_string(const Instance& inst) {
  std::ostringstream os;
  write_instance(os, inst);
  return os.str();
}

/// Parses an instance. Syntax errors report the line and column; schema
/// errors report the path of the offending field.
inline Instance read_instance(std::istream& is) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(is);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed instance: ") + e.what());
  }
  detail::Reader root("$");

  std::vector<Variable> vars;
  std::map<int, VarIndex> index;
  const json& jv = root.at("variables").array(root.field(doc, "variables"));
  for (std::size_t i = 0; i < jv.size(); ++i) {
    auto r = root.at("variables").at(i);
    Variable var;
    var.id = r.at("id").integer(r.field(jv[i], "id"));
    const json& dom = r.at("domain").array(r.field(jv[i], "domain"));
    for (std::size_t k = 0; k < dom.size(); ++k) var.domain.push_back(r.at("domain").at(k).integer(dom[k]));
    if (!index.emplace(var.id, vars.size()).second) r.fail("duplicate variable id " + std::to_string(var.id));
    vars.push_back(std::move(var));
  }

  std::vector<int> owners(vars.size(), 0);
  std::vector<bool> owned(vars.size(), false);
  const json& ja = root.at("agents").array(root.field(doc, "agents"));
  for (std::size_t i = 0; i < ja.size(); ++i) {
    auto r = root.at("agents").at(i);
    int id = r.at("id").integer(r.field(ja[i], "id"));
    const json& owns = r.at("owns").array(r.field(ja[i], "owns"));
    if (owns.size() != 1) r.at("owns").fail("each agent owns exactly one variable");
    int var = r.at("owns").at(0).integer(owns[0]);
    auto it = index.find(var);
    if (it == index.end()) r.at("owns").fail("unknown variable " + std::to_string(var));
    if (owned[it->second]) r.at("owns").fail("variable " + std::to_string(var) + " owned twice");
    owned[it->second] = true;
    owners[it->second] = id;
  }
  for (VarIndex v = 0; v < vars.size(); ++v) {
    if (!owned[v]) root.at("agents").fail("variable " + std::to_string(vars[v].id) + " has no owner");
  }

  std::vector<BinaryFunction> fns;
  const json& jf = root.at("functions").array(root.field(doc, "functions"));
  for (std::size_t i = 0; i < jf.size(); ++i) {
    auto r = root.at("functions").at(i);
    int id = r.at("id").integer(r.field(jf[i], "id"));
    const json& scope = r.at("scope").array(r.field(jf[i], "scope"));
    if (scope.size() != 2) r.at("scope").fail("expected two variables");
    VarIndex ends[2];
    for (int s = 0; s < 2; ++s) {
      int var = r.at("scope").at(static_cast<std::size_t>(s)).integer(scope[s]);
      auto it = index.find(var);
      if (it == index.end()) r.at("scope").fail("unknown variable " + std::to_string(var));
      ends[s] = it->second;
    }
    if (ends[0] == ends[1]) r.at("scope").fail("scope needs two distinct variables");
    const auto& da = vars[ends[0]].domain;
    const auto& db = vars[ends[1]].domain;
    std::vector<Utility> table(da.size() * db.size());
    std::vector<bool> filled(table.size(), false);
    const json& rows = r.at("table").array(r.field(jf[i], "table"));
    for (std::size_t k = 0; k < rows.size(); ++k) {
      auto rr = r.at("table").at(k);
      const json& row = rr.array(rows[k]);
      if (row.size() != 3) rr.fail("expected [value, value, utility]");
      int a = rr.at(0).integer(row[0]);
      int b = rr.at(1).integer(row[1]);
      auto ia = std::find(da.begin(), da.end(), a);
      auto ib = std::find(db.begin(), db.end(), b);
      if (ia == da.end() || ib == db.end()) rr.fail("value outside the domain");
      std::size_t slot = static_cast<std::size_t>(ia - da.begin()) * db.size() + static_cast<std::size_t>(ib - db.begin());
      if (filled[slot]) rr.fail("duplicate entry");
      filled[slot] = true;
      table[slot] = rr.at(2).utility(row[2]);
    }
    for (bool f : filled) {
      if (!f) r.at("table").fail("table does not cover every value pair");
    }
    fns.emplace_back(id, ends[0], ends[1], da.size(), db.size(), std::move(table));
  }

  Instance inst(std::move(vars), std::move(owners), std::move(fns));
  if (auto it = doc.find("provenance"); it != doc.end()) {
    if (!it->is_object()) root.at("provenance").fail("expected an object");
    if (!it->empty()) inst.set_provenance(it->dump());
  }
  if (auto it = doc.find("meetings"); it != doc.end()) {
    auto r = root.at("meetings");
    const json& jm = r.array(*it);
    std::vector<Meeting> meetings(inst.num_variables());
    std::vector<bool> seen(inst.num_variables(), false);
    for (std::size_t i = 0; i < jm.size(); ++i) {
      auto ri = r.at(i);
      int var = ri.at("variable").integer(ri.field(jm[i], "variable"));
      auto found = index.find(var);
      if (found == index.end()) ri.at("variable").fail("unknown variable " + std::to_string(var));
      if (seen[found->second]) ri.at("variable").fail("duplicate meeting");
      seen[found->second] = true;
      Meeting& m = meetings[found->second];
      m.duration = ri.at("duration").integer(ri.field(jm[i], "duration"));
      const json& ps = ri.at("participants").array(ri.field(jm[i], "participants"));
      for (std::size_t k = 0; k < ps.size(); ++k) m.participants.push_back(ri.at("participants").at(k).integer(ps[k]));
    }
    inst.set_meetings(std::move(meetings));
  }
  return inst;
}

inline Instance parse_instance(const std::string& text) {
  std::istringstream is(text);
  return read_instance(is);
}

inline Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open instance file " + path);
  return read_instance(in);
}

inline void save_instance(const std::string& path, const Instance& inst) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write instance file " + path);
  write_instance(out, inst);
}

}  // namespace dlns
