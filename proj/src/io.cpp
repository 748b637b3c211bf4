#include "fcnf/io.hpp"

#include <fstream>
#include <sstream>

namespace fcnf {

using nlohmann::json;

nlohmann::json instance_to_json(const FCNFInstance& instance) {
  json nodes = json::array();
  for (int i = 0; i < instance.node_count; ++i) {
    nodes.push_back({{"id", i}, {"requirement", instance.requirement[static_cast<size_t>(i)]}});
  }
  json arcs = json::array();
  for (size_t e = 0; e < instance.arcs.size(); ++e) {
    arcs.push_back({{"tail", instance.arcs[e].tail},
                    {"head", instance.arcs[e].head},
                    {"variable_cost", instance.variable_cost[e]},
                    {"fixed_cost", instance.fixed_cost[e]},
                    {"capacity", instance.capacity[e]}});
  }
  return json{{"version", 1}, {"nodes", nodes}, {"arcs", arcs}};
}

FCNFInstance instance_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("instance document is not a JSON object");
  if (!j.contains("version") || !j["version"].is_number_integer())
    throw ParseError("missing integer schema version");
  if (j["version"].get<int>() != 1) {
    std::ostringstream os;
    os << "unsupported schema version " << j["version"].get<int>() << " (expected 1)";
    throw ParseError(os.str());
  }
  if (!j.contains("nodes") || !j["nodes"].is_array() || j["nodes"].empty())
    throw ParseError("missing non-empty nodes array");
  if (!j.contains("arcs") || !j["arcs"].is_array()) throw ParseError("missing arcs array");

  FCNFInstance instance;
  instance.node_count = static_cast<int>(j["nodes"].size());
  instance.requirement.assign(static_cast<size_t>(instance.node_count), 0.0);
  std::vector<char> seen(static_cast<size_t>(instance.node_count), 0);
  for (const auto& node : j["nodes"]) {
    if (!node.contains("id") || !node.contains("requirement"))
      throw ParseError("node entry missing id or requirement");
    const int id = node["id"].get<int>();
    if (id < 0 || id >= instance.node_count)
      throw ParseError("node ids must be exactly 0..n-1");
    if (seen[static_cast<size_t>(id)]) throw ParseError("duplicate node id");
    seen[static_cast<size_t>(id)] = 1;
    instance.requirement[static_cast<size_t>(id)] = node["requirement"].get<double>();
  }

  for (const auto& arc : j["arcs"]) {
    for (const char* key : {"tail", "head", "variable_cost", "fixed_cost", "capacity"}) {
      if (!arc.contains(key)) {
        std::ostringstream os;
        os << "arc entry missing field '" << key << "'";
        throw ParseError(os.str());
      }
    }
    instance.arcs.push_back({arc["tail"].get<int>(), arc["head"].get<int>()});
    instance.variable_cost.push_back(arc["variable_cost"].get<double>());
    instance.fixed_cost.push_back(arc["fixed_cost"].get<double>());
    instance.capacity.push_back(arc["capacity"].get<double>());
  }

  try {
    instance.validate();
  } catch (const ValidationError& err) {
    throw ParseError(std::string("invalid instance: ") + err.what());
  }
  return instance;
}

FCNFInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open instance file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& err) {
    throw ParseError(std::string("malformed JSON in ") + path + ": " + err.what());
  }
  return instance_from_json(j);
}

void save_instance(const FCNFInstance& instance, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open file for writing: " + path);
  out << instance_to_json(instance).dump(2) << "\n";
}

FCNFInstance load_dimacs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open DIMACS file: " + path);

  FCNFInstance instance;
  int declared_arcs = -1;
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& msg) {
    std::ostringstream os;
    os << path << ":" << line_no << ": " << msg;
    throw ParseError(os.str());
  };

  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream is(line);
    std::string tag;
    if (!(is >> tag)) continue;
    if (tag == "c") {
      std::string word;
      if (is >> word && word == "fixed") {
        double value = 0.0;
        if (!(is >> value)) fail("malformed 'c fixed' line");
        if (instance.fixed_cost.empty()) fail("'c fixed' before any arc line");
        instance.fixed_cost.back() = value;
      }
    } else if (tag == "p") {
      std::string problem;
      int n = 0;
      int m = 0;
      if (!(is >> problem >> n >> m) || problem != "min") fail("expected 'p min <nodes> <arcs>'");
      instance.node_count = n;
      instance.requirement.assign(static_cast<size_t>(n), 0.0);
      declared_arcs = m;
    } else if (tag == "n") {
      int id = 0;
      double flow = 0.0;
      if (!(is >> id >> flow)) fail("malformed node descriptor");
      if (instance.node_count == 0) fail("node descriptor before problem line");
      if (id < 1 || id > instance.node_count) fail("node id out of range");
      instance.requirement[static_cast<size_t>(id - 1)] = flow;
    } else if (tag == "a") {
      int tail = 0;
      int head = 0;
      double low = 0.0;
      double cap = 0.0;
      double cost = 0.0;
      if (!(is >> tail >> head >> low >> cap >> cost)) fail("malformed arc descriptor");
      if (instance.node_count == 0) fail("arc descriptor before problem line");
      if (low != 0.0) fail("nonzero lower bounds are not supported");
      instance.arcs.push_back({tail - 1, head - 1});
      instance.variable_cost.push_back(cost);
      instance.fixed_cost.push_back(0.0);
      instance.capacity.push_back(cap);
    } else {
      fail("unknown line tag '" + tag + "'");
    }
  }

  if (declared_arcs >= 0 && declared_arcs != instance.arc_count()) {
    std::ostringstream os;
    os << path << ": declared " << declared_arcs << " arcs but found " << instance.arc_count();
    throw ParseError(os.str());
  }
  try {
    instance.validate();
  } catch (const ValidationError& err) {
    throw ParseError(std::string("invalid DIMACS instance: ") + err.what());
  }
  return instance;
}

}  // namespace fcnf
