#pragma once

#include <stdexcept>
#include <string>

#include "pqe/query.hpp"

namespace pqe {

struct PaqlError : std::runtime_error {
  int line, column;
  PaqlError(const std::string& msg, int line_, int col_)
      : std::runtime_error(msg + " (line " + std::to_string(line_) + ", column " +
                           std::to_string(col_) + ")"),
        line(line_),
        column(col_) {}
};

// Parses the PaQL subset:
//   SELECT PACKAGE(*) AS <alias> FROM <table> [REPEAT <r>]
//   [WHERE <attr> <cmp> <value> [AND ...]]
//   SUCH THAT <constraint> [[AND] <constraint>]...
//   MAXIMIZE|MINIMIZE SUM(<alias>.<attr>)
// Constraints: COUNT(alias.*) / SUM(alias.attr) / AVG(alias.attr) with
// =, <=, >= (also as chained "a <= COUNT(P.*) <= b") or BETWEEN a AND b.
PackageQuery parse_paql(const std::string& text);

// Canonical rendering; parse(print(q)) == q.
std::string to_paql(const PackageQuery& q);

}  // namespace pqe
