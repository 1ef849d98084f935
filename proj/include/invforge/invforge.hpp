#ifndef INVFORGE_INVFORGE_HPP
#define INVFORGE_INVFORGE_HPP

// Convenience umbrella: the whole pipeline in one include.

#include <invforge/analysis.hpp>
#include <invforge/ast.hpp>
#include <invforge/error.hpp>
#include <invforge/lexer.hpp>
#include <invforge/parser.hpp>
#include <invforge/printer.hpp>
#include <invforge/report.hpp>
#include <invforge/smtlib.hpp>
#include <invforge/solver.hpp>
#include <invforge/typecheck.hpp>
#include <invforge/verifier.hpp>
#include <invforge/weakening.hpp>
#include <invforge/wp.hpp>

#endif  // INVFORGE_INVFORGE_HPP
