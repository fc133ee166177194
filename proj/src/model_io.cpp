#include "bell/model_io.hpp"

#include <array>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "bell/errors.hpp"

namespace bell {

using nlohmann::json;

namespace {

json side_to_json(const std::vector<LocalSetting>& settings) {
  json out = json::object();
  for (const auto& s : settings) {
    json pmf = json::array();
    for (const auto& w : s.pmf.weights) pmf.push_back(w.str());
    out[s.label] = {{"pmf", pmf}, {"table", s.table.values}};
  }
  return out;
}

void require_only(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ParseError(where + ": unknown field \"" + key + "\"");
  }
}

const json& field(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(where + ": missing field \"" + key + "\"");
  return *it;
}

Rational rational_field(const json& value, const std::string& where) {
  if (!value.is_string()) throw ParseError(where + ": expected a rational string");
  try {
    return Rational::parse(value.get<std::string>());
  } catch (const ParseError& e) {
    throw ParseError(where + ": " + e.what());
  }
}

std::vector<LocalSetting> side_from_json(const json& obj, Side side) {
  const std::string who = to_string(side);
  if (!obj.is_object()) throw ParseError(who + ": expected an object of settings");
  std::vector<LocalSetting> out;
  for (const auto& [label, body] : obj.items()) {
    const std::string where = who + "[" + label + "]";
    if (!body.is_object()) throw ParseError(where + ": expected an object");
    require_only(body, {"pmf", "table"}, where);
    LocalSetting s;
    s.label = label;
    const auto& pmf = field(body, "pmf", where);
    if (!pmf.is_array()) throw ParseError(where + ".pmf: expected an array");
    for (std::size_t i = 0; i < pmf.size(); ++i) {
      s.pmf.weights.push_back(rational_field(pmf[i], where + ".pmf[" + std::to_string(i) + "]"));
    }
    const auto& table = field(body, "table", where);
    if (!table.is_array()) throw ParseError(where + ".table: expected an array of rows");
    s.table.side = side;
    s.table.setting = label;
    for (std::size_t r = 0; r < table.size(); ++r) {
      const std::string row_where = where + ".table[" + std::to_string(r) + "]";
      if (!table[r].is_array()) throw ParseError(row_where + ": expected an array");
      std::vector<int> row;
      for (const auto& v : table[r]) {
        if (!v.is_number_integer()) throw ParseError(row_where + ": expected integer outcomes");
        row.push_back(v.get<int>());
      }
      s.table.values.push_back(std::move(row));
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

json model_to_json(const ContextualModel& model) {
  json source = json::array();
  for (const auto& row : model.source.weights) {
    json r = json::array();
    for (const auto& w : row) r.push_back(w.str());
    source.push_back(r);
  }
  return {{"source", source}, {"alice", side_to_json(model.alice)}, {"bob", side_to_json(model.bob)}};
}

ContextualModel model_from_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("model: expected a JSON object");
  require_only(doc, {"source", "alice", "bob", "description"}, "model");
  if (auto d = doc.find("description"); d != doc.end() && !d->is_string()) {
    throw ParseError("model.description: expected a string");
  }
  ContextualModel m;
  const auto& source = field(doc, "source", "model");
  if (!source.is_array()) throw ParseError("source: expected a matrix of rational strings");
  for (std::size_t r = 0; r < source.size(); ++r) {
    const std::string where = "source[" + std::to_string(r) + "]";
    if (!source[r].is_array()) throw ParseError(where + ": expected an array");
    std::vector<Rational> row;
    for (std::size_t c = 0; c < source[r].size(); ++c) {
      row.push_back(rational_field(source[r][c], where + "[" + std::to_string(c) + "]"));
    }
    m.source.weights.push_back(std::move(row));
  }
  m.alice = side_from_json(field(doc, "alice", "model"), Side::alice);
  m.bob = side_from_json(field(doc, "bob", "model"), Side::bob);
  return m;
}

std::string serialize_model(const ContextualModel& model) { return model_to_json(model).dump(); }

ContextualModel parse_model(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  return model_from_json(doc);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ContextualModel load_model(const std::filesystem::path& path) { return parse_model(read_file(path)); }

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

std::string model_hash(const ContextualModel& model) { return sha256_hex(serialize_model(model)); }

json rational_json(const Rational& value) { return {{"value", value.str()}, {"decimal", value.decimal(12)}}; }

}  // namespace bell
