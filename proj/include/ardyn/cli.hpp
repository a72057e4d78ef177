// Command-line front end: option parsing and dispatch to the library.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ardyn/measures.hpp"

namespace ardyn::cli {

/// Bad invocation: exit status 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string subcommand;
  std::vector<std::string> catalog;  // catalog names, in order
  std::vector<std::string> map_files;
  std::vector<std::string> points;   // raw "x,y" strings
  int depth = -1;                    // -1: subcommand default
  int iters = -1;
  double tol = 1e-10;
  std::string window;                // "x0,x1,y0,y1", empty: default
  int res = -1;
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "json";
  std::string curve;                 // "E1" / "E2"
  std::string lambda;                // "a,b,d"
  int period = 1;
  std::string method;                // measure: green | preimage; julia: measure | green
};

struct Subcommand {
  std::string name;
  std::string help;
  /// Library operations this subcommand exposes; each appears in exactly one entry.
  std::vector<std::string> operations;
};

const std::vector<Subcommand>& dispatch_table();

/// Reads a map file: {"field": {"d": D}, "num": [...], "den": [...]} with
/// coefficient strings (or integers) lowest degree first.
RationalMap read_map_file(const std::string& path);

/// Runs a parsed configuration. Returns 0, 1 (domain error) or 2 (usage error).
int execute(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Parses arguments (without the program name) and executes.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ardyn::cli
