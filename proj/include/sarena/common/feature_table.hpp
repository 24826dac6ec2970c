#pragma once

#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace sarena {

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Named real-valued columns keyed by workbook ID.
struct FeatureTable {
  std::vector<std::string> names;
  std::map<std::string, std::vector<double>> rows;

  bool empty() const { return rows.empty(); }
  const std::vector<double>* find(const std::string& id) const;
  int column(const std::string& name) const;  // -1 when absent
  bool operator==(const FeatureTable&) const = default;
};

// CSV with a leading workbook_id column. Values written with %.17g.
void write_feature_csv(std::ostream& out, const FeatureTable& table);
FeatureTable read_feature_csv(std::istream& in);

// One {"workbook_id": ..., "features": {name: value}} object per line.
void write_feature_jsonl(std::ostream& out, const FeatureTable& table);
FeatureTable read_feature_jsonl(std::istream& in);

// Picks the reader from the file extension (.csv, otherwise JSONL).
FeatureTable load_feature_table(const std::string& path);

// RFC 4180 field splitting for one line; no embedded newlines.
std::vector<std::string> split_csv_line(const std::string& line);
std::string csv_escape(const std::string& field);
std::string format_double(double v);

}  // namespace sarena
