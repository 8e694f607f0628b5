#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qtn/nc_partition.hpp"
#include "qtn/slurp.hpp"

namespace qtn::dsl {

// Formula alphabet: variables a b c d i, digits 0-3, + - %, parentheses,
// ∨ ∧ ¬ (ASCII aliases | & !), and the comparisons > < =.

std::vector<char32_t> utf8_decode(std::string_view text);
void utf8_append(std::string& out, char32_t cp);
std::size_t codepoint_length(std::string_view text);

enum class TokenKind {
  Var,
  Literal,
  Plus,
  Minus,
  Mod,
  LParen,
  RParen,
  Or,
  And,
  Not,
  Gt,
  Lt,
  Eq,
};

struct Token {
  TokenKind kind;
  long long value = 0;   // Literal
  char var = 0;          // Var
  std::size_t pos = 0;   // codepoint offset
};

std::vector<Token> tokenize(std::string_view text);

enum class NodeKind { Var, Literal, Add, Sub, Mod, Lt, Gt, Eq, And, Or, Not };

struct FormulaAst {
  NodeKind kind = NodeKind::Literal;
  char var = 0;
  long long value = 0;
  std::vector<FormulaAst> children;

  bool operator==(const FormulaAst&) const = default;
};

// Precedence, loosest to tightest: ∨, ∧, ¬ (prefix), comparisons, + -, %,
// parentheses. Binary levels associate left; comparisons chain on values.
FormulaAst parse_infix(const std::vector<Token>& tokens);
FormulaAst parse_rpn(const std::vector<Token>& tokens);

enum class Notation { Rpn, Infix, InfixSpaced };

std::string notation_name(Notation notation);
std::optional<Notation> notation_from_name(std::string_view name);

FormulaAst parse_formula(std::string_view text, Notation notation = Notation::Infix);

// Infix printing parenthesizes every compound operand; spaced infix puts one
// space between adjacent tokens; RPN is space-separated postfix. Each
// notation round-trips through its parser to the identical tree.
std::string print(const FormulaAst& ast, Notation notation);

struct EvalEnv {
  long long a = 0, b = 0, c = 0, d = 0;
  long long i = 0;
  long long n = 0;
};

// Comparisons yield 0/1; ∧ ∨ short-circuit and return an operand value like
// Python's and/or; ¬ yields 0/1; % is floored with positive divisor only.
// nullopt signals evaluation failure (bad divisor or 64-bit overflow).
std::optional<long long> eval(const FormulaAst& ast, const EvalEnv& env);

std::optional<long long> apply(const FormulaAst& ast, const std::array<long long, 4>& tuple,
                               int n);
std::optional<long long> apply(const FormulaAst& ast, const NC3& e, int n);

// Block tuples for every object of an instance, decoded once.
struct InstanceEnvs {
  int n = 0;
  std::vector<std::array<long long, 4>> tuples;

  static InstanceEnvs of(const SlurpInstance& inst);
};

struct Fingerprint {
  bool invalid = false;
  std::vector<long long> values;

  bool operator==(const Fingerprint&) const = default;
};

// Value vector over the instance's object order; any evaluation failure
// collapses the whole fingerprint into the single invalid class.
Fingerprint fingerprint(const FormulaAst& ast, const InstanceEnvs& envs);
Fingerprint fingerprint(const FormulaAst& ast, const SlurpInstance& inst);

Distance formula_delta(const FormulaAst& ast, const SlurpInstance& inst,
                       const InstanceEnvs& envs);

// One formula per line under a "#notation: infix|rpn|infix_spaced" header.
struct FormulaFile {
  Notation notation = Notation::Infix;
  std::vector<std::string> lines;
};

void write_formula_file(const FormulaFile& file, const std::string& path);
FormulaFile read_formula_file(const std::string& path);

}  // namespace qtn::dsl
