#include "evoter/schema.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "evoter/errors.hpp"

namespace evoter {

namespace {

bool name_char(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
         c == '.' || c == '_' || c == '/' || c == '[' || c == ']' || c == ')' || c == '-';
}

std::string lowercase(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

FeatureSchema::FeatureSchema(std::vector<FeatureSpec> features, std::vector<std::string> actions,
                             int max_lag)
    : features_(std::move(features)), actions_(std::move(actions)), max_lag_(max_lag) {
  validate();
}

bool FeatureSchema::valid_feature_name(const std::string& name) {
  if (name.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(name[0]))) return false;
  for (char c : name)
    if (!name_char(c)) return false;
  return true;
}

std::optional<std::size_t> FeatureSchema::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < features_.size(); ++i)
    if (features_[i].name == name) return i;
  return std::nullopt;
}

bool FeatureSchema::has_action(const std::string& name) const {
  for (const auto& a : actions_)
    if (a == name) return true;
  return false;
}

void FeatureSchema::validate() const {
  std::set<std::string> seen;
  for (const auto& f : features_) {
    if (!valid_feature_name(f.name)) throw InvalidSchema("bad feature name '" + f.name + "'");
    if (lowercase(f.name) == "default")
      throw InvalidSchema("'default' is reserved and cannot name a feature");
    if (!seen.insert(f.name).second) throw InvalidSchema("duplicate feature '" + f.name + "'");
    if (f.kind == FeatureKind::Binary) {
      if (f.min != 0.0 || f.max != 1.0)
        throw InvalidSchema("binary feature '" + f.name + "' must have range [0, 1]");
    } else if (!(f.min < f.max)) {
      throw InvalidSchema("feature '" + f.name + "' needs min < max");
    }
  }
  std::set<std::string> act;
  for (const auto& a : actions_) {
    if (a.empty() || a.front() == ' ' || a.back() == ' ')
      throw InvalidSchema("action name '" + a + "' must be nonempty without edge spaces");
    if (!act.insert(a).second) throw InvalidSchema("duplicate action '" + a + "'");
  }
  if (max_lag_ < 0) throw InvalidSchema("max_lag must be >= 0");
}

std::string FeatureSchema::to_json_text() const {
  nlohmann::json j;
  j["features"] = nlohmann::json::array();
  for (const auto& f : features_) {
    j["features"].push_back({{"name", f.name},
                             {"min", f.min},
                             {"max", f.max},
                             {"kind", f.kind == FeatureKind::Binary ? "binary" : "continuous"}});
  }
  j["actions"] = actions_;
  j["max_lag"] = max_lag_;
  return j.dump(2) + "\n";
}

FeatureSchema FeatureSchema::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidSchema(std::string("not valid JSON: ") + e.what());
  }
  if (!j.contains("features") || !j["features"].is_array())
    throw InvalidSchema("missing \"features\" array");
  std::vector<FeatureSpec> feats;
  for (const auto& f : j["features"]) {
    FeatureSpec spec;
    if (!f.contains("name")) throw InvalidSchema("feature without \"name\"");
    spec.name = f["name"].get<std::string>();
    const std::string kind = f.value("kind", "continuous");
    if (kind == "binary") {
      spec.kind = FeatureKind::Binary;
      spec.min = 0.0;
      spec.max = 1.0;
    } else if (kind == "continuous") {
      spec.kind = FeatureKind::Continuous;
      if (!f.contains("min") || !f.contains("max"))
        throw InvalidSchema("continuous feature '" + spec.name + "' needs min and max");
      spec.min = f["min"].get<double>();
      spec.max = f["max"].get<double>();
    } else {
      throw InvalidSchema("feature '" + spec.name + "' has unknown kind '" + kind + "'");
    }
    feats.push_back(std::move(spec));
  }
  std::vector<std::string> actions;
  if (j.contains("actions")) actions = j["actions"].get<std::vector<std::string>>();
  const int max_lag = j.value("max_lag", 0);
  return FeatureSchema(std::move(feats), std::move(actions), max_lag);
}

FeatureSchema FeatureSchema::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidSchema("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

void FeatureSchema::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << to_json_text();
}

}  // namespace evoter
