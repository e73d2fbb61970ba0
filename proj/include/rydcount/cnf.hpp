#pragma once

#include <charconv>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "rydcount/errors.hpp"
#include "rydcount/graph.hpp"

namespace rydcount {

// DIMACS CNF interchange.  Every clause is (-i -j 0) with 1-indexed
// variables, one clause per edge in sorted order.  Vertex labels ride along
// in a "c labels ..." comment so that a round trip is label-exact; standard
// model counters ignore the comment.

inline std::string to_cnf(const BlockadeGraph& g) {
  std::ostringstream out;
  out << "c labels";
  for (int label : g.labels) out << ' ' << label;
  out << '\n';
  out << "p cnf " << g.n << ' ' << g.edges.size() << '\n';
  for (const auto& [i, j] : g.edges) out << '-' << (i + 1) << " -" << (j + 1) << " 0\n";
  return out.str();
}

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

inline long long parse_int(std::string_view tok, int line_no) {
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size())
    throw ParseError(line_no, "malformed integer '" + std::string(tok) + "'");
  return value;
}

}  // namespace detail

inline BlockadeGraph parse_cnf(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  int n = -1;
  long long m = -1;
  std::vector<int> labels;
  std::vector<std::pair<int, int>> edges;

  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = detail::split_ws(line);
    if (tokens.empty()) continue;
    if (tokens[0] == "c") {
      if (tokens.size() >= 2 && tokens[1] == "labels") {
        labels.clear();
        for (std::size_t t = 2; t < tokens.size(); ++t)
          labels.push_back(static_cast<int>(detail::parse_int(tokens[t], line_no)));
      }
      continue;
    }
    if (tokens[0] == "p") {
      if (n >= 0) throw ParseError(line_no, "duplicate problem header");
      if (tokens.size() != 4 || tokens[1] != "cnf")
        throw ParseError(line_no, "malformed header, expected 'p cnf <vars> <clauses>'");
      n = static_cast<int>(detail::parse_int(tokens[2], line_no));
      m = detail::parse_int(tokens[3], line_no);
      if (n < 0 || m < 0) throw ParseError(line_no, "negative header counts");
      continue;
    }
    // Clause line.
    if (n < 0) throw ParseError(line_no, "clause before problem header");
    std::vector<long long> lits;
    for (const auto& tok : tokens) lits.push_back(detail::parse_int(tok, line_no));
    if (lits.empty() || lits.back() != 0)
      throw ParseError(line_no, "clause must be terminated by 0");
    lits.pop_back();
    if (lits.size() != 2)
      throw ParseError(line_no, "clause must have exactly two literals, got " +
                                    std::to_string(lits.size()));
    for (long long lit : lits) {
      if (lit > 0) throw ParseError(line_no, "non-monotone clause (positive literal)");
      if (lit == 0) throw ParseError(line_no, "unexpected 0 inside clause");
      if (-lit > n) throw ParseError(line_no, "literal out of range");
    }
    const int a = static_cast<int>(-lits[0]) - 1;
    const int b = static_cast<int>(-lits[1]) - 1;
    if (a == b) throw ParseError(line_no, "clause repeats a variable");
    edges.emplace_back(a, b);
  }

  if (n < 0) throw ParseError("missing problem header");
  if (static_cast<long long>(edges.size()) != m)
    throw ParseError("clause count " + std::to_string(edges.size()) +
                     " does not match header " + std::to_string(m));
  if (!labels.empty() && static_cast<int>(labels.size()) != n)
    throw ParseError("labels comment has " + std::to_string(labels.size()) +
                     " entries for " + std::to_string(n) + " variables");
  try {
    return make_graph(n, std::move(edges), std::nullopt, std::move(labels));
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("invalid instance: ") + e.what());
  }
}

}  // namespace rydcount
