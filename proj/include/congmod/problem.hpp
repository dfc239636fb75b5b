// Problem files: a small INI dialect describing one analysis instance.
//
//   [dvr]     prime = 2
//   [ring]    kind = table | poly, then either the multiplication table
//             (dim, labels, unit, mult i j = coords of b_i * b_j for i <= j)
//             or the presentation (vars, repeatable gen = <polynomial>)
//   [point]   values = one scalar per basis element / variable (required)
//   [module]  gens = n plus repeatable col; scalar coordinates on a table
//             ring, comma-separated polynomials on a polynomial ring
//   [chain]   repeatable cut = <polynomial>, polynomial rings only
//   [checks]  cross = on|off, strict = on|off
//
// '#' starts a comment.  Unknown sections or keys are errors, as are
// duplicates.  Diagnostics carry file:line:column positions.  print_problem
// emits a canonical form that parses back to the same problem.
#pragma once

#include <string>

#include "congmod/engine.hpp"

namespace congmod {

Problem parse_problem_text(const std::string& text, const std::string& filename);
Problem parse_problem_file(const std::string& path);
std::string print_problem(const Problem& pr);

}  // namespace congmod
