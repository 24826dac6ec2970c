#include "sarena/common/feature_table.hpp"

#include <cstdio>
#include <fstream>

#include "json.hpp"

namespace sarena {

const std::vector<double>* FeatureTable::find(const std::string& id) const {
  auto it = rows.find(id);
  return it == rows.end() ? nullptr : &it->second;
}

int FeatureTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<int>(i);
  return -1;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

void write_feature_csv(std::ostream& out, const FeatureTable& table) {
  out << "workbook_id";
  for (const auto& n : table.names) out << ',' << csv_escape(n);
  out << '\n';
  for (const auto& [id, values] : table.rows) {
    out << csv_escape(id);
    for (double v : values) out << ',' << format_double(v);
    out << '\n';
  }
}

FeatureTable read_feature_csv(std::istream& in) {
  FeatureTable t;
  std::string line;
  if (!std::getline(in, line)) return t;
  auto header = split_csv_line(line);
  if (header.empty() || header[0] != "workbook_id")
    throw InputError("feature CSV must start with a workbook_id column");
  t.names.assign(header.begin() + 1, header.end());
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw InputError("feature CSV line " + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " fields");
    std::vector<double> values;
    for (std::size_t i = 1; i < fields.size(); ++i) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(fields[i], &used));
        if (used != fields[i].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw InputError("feature CSV line " + std::to_string(line_no) +
                         ": bad number '" + fields[i] + "'");
      }
    }
    t.rows[fields[0]] = std::move(values);
  }
  return t;
}

void write_feature_jsonl(std::ostream& out, const FeatureTable& table) {
  for (const auto& [id, values] : table.rows) {
    nlohmann::ordered_json row;
    row["workbook_id"] = id;
    nlohmann::ordered_json feats = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < table.names.size(); ++i) feats[table.names[i]] = values[i];
    row["features"] = std::move(feats);
    out << row.dump() << '\n';
  }
}

FeatureTable read_feature_jsonl(std::istream& in) {
  FeatureTable t;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::ordered_json row;
    try {
      row = nlohmann::ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw InputError("features line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!row.contains("workbook_id") || !row["workbook_id"].is_string() ||
        !row.contains("features") || !row["features"].is_object())
      throw InputError("features line " + std::to_string(line_no) +
                       ": expected workbook_id and features");
    const auto& feats = row["features"];
    if (t.names.empty()) {
      for (auto it = feats.begin(); it != feats.end(); ++it) t.names.push_back(it.key());
    }
    std::vector<double> values;
    for (const auto& name : t.names) {
      auto it = feats.find(name);
      if (it == feats.end() || !it->is_number())
        throw InputError("features line " + std::to_string(line_no) + ": missing '" + name + "'");
      values.push_back(it->get<double>());
    }
    if (feats.size() != t.names.size())
      throw InputError("features line " + std::to_string(line_no) + ": unexpected feature set");
    t.rows[row["workbook_id"].get<std::string>()] = std::move(values);
  }
  return t;
}

FeatureTable load_feature_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read feature file '" + path + "'");
  bool csv = path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
  return csv ? read_feature_csv(in) : read_feature_jsonl(in);
}

}  // namespace sarena
