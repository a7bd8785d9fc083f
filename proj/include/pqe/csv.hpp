#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pqe/relation.hpp"

namespace pqe {

struct CsvOptions {
  // When set, only these columns load (all must exist in the header).
  std::vector<std::string> columns;
};

// Header-driven CSV ingestion; parse failures report 1-based row numbers and
// the offending column.
Relation ingest_csv(const std::string& path, const CsvOptions& opts = {});

// Columnar relation cache: <dir>/relation.json (names, n) and
// <dir>/values.bin (attribute-major 64-bit floats).
void save_relation(const Relation& rel, const std::string& dir);
Relation load_relation(const std::string& dir);

}  // namespace pqe
