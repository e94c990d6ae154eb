#pragma once
// Deterministic text output: RFC-4180 CSV (header mandatory, LF endings,
// UTF-8, 17 significant digits for reals) and stable-key-order JSON.  Both
// formats are byte-identical across reruns with the same inputs, which the
// reproducibility tests diff directly.

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "pwl/errors.hpp"

namespace pwl {

// JSON with insertion-ordered keys, so serialization order is stable.
using Json = nlohmann::ordered_json;

// Formats a real with up to 17 significant digits (round-trip exact).
std::string format_real(double x);

class CsvWriter {
 public:
  // Opens the file for writing and emits the header row immediately.
  CsvWriter(const std::string& path, const std::vector<std::string>& header);

  // One row; fields are quoted only when RFC 4180 requires it.
  void row(const std::vector<std::string>& fields);

  // Convenience for mixed rows: reals go through format_real.
  class RowBuilder {
   public:
    explicit RowBuilder(CsvWriter& w) : w_(w) {}
    RowBuilder& add(const std::string& s) {
      fields_.push_back(s);
      return *this;
    }
    RowBuilder& add(const char* s) { return add(std::string(s)); }
    RowBuilder& add(double x) { return add(format_real(x)); }
    RowBuilder& add(long long v) { return add(std::to_string(v)); }
    RowBuilder& add(int v) { return add(std::to_string(v)); }
    void done() { w_.row(fields_); }

   private:
    CsvWriter& w_;
    std::vector<std::string> fields_;
  };
  RowBuilder row_builder() { return RowBuilder(*this); }

  std::size_t n_columns() const { return n_columns_; }

 private:
  std::ofstream out_;
  std::size_t n_columns_;
};

// Serializes with 2-space indentation and a trailing newline.
void write_json_file(const std::string& path, const Json& j);

Json read_json_file(const std::string& path);

// Creates the directory (and parents); throws ConfigInvalid on failure.
void ensure_directory(const std::string& path);

}  // namespace pwl
