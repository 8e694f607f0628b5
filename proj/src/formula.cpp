#include "qtn/formula.hpp"

#include <fstream>
#include <limits>

#include "qtn/errors.hpp"

namespace qtn::dsl {

namespace {

constexpr char32_t kAndCp = U'∧';
constexpr char32_t kOrCp = U'∨';
constexpr char32_t kNotCp = U'¬';

}  // namespace

std::vector<char32_t> utf8_decode(std::string_view text) {
  std::vector<char32_t> out;
  std::size_t i = 0;
  while (i < text.size()) {
    unsigned char b0 = static_cast<unsigned char>(text[i]);
    char32_t cp = 0;
    std::size_t len = 0;
    if (b0 < 0x80) {
      cp = b0;
      len = 1;
    } else if ((b0 & 0xe0) == 0xc0) {
      cp = b0 & 0x1f;
      len = 2;
    } else if ((b0 & 0xf0) == 0xe0) {
      cp = b0 & 0x0f;
      len = 3;
    } else if ((b0 & 0xf8) == 0xf0) {
      cp = b0 & 0x07;
      len = 4;
    } else {
      throw ParseError(ParseCode::Lex, out.size(), "invalid UTF-8 byte");
    }
    if (i + len > text.size())
      throw ParseError(ParseCode::Lex, out.size(), "truncated UTF-8 sequence");
    for (std::size_t j = 1; j < len; ++j) {
      unsigned char bj = static_cast<unsigned char>(text[i + j]);
      if ((bj & 0xc0) != 0x80)
        throw ParseError(ParseCode::Lex, out.size(), "invalid UTF-8 continuation");
      cp = (cp << 6) | (bj & 0x3f);
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

void utf8_append(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xc0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xe0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  } else {
    out.push_back(static_cast<char>(0xf0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  }
}

std::size_t codepoint_length(std::string_view text) { return utf8_decode(text).size(); }

std::vector<Token> tokenize(std::string_view text) {
  auto cps = utf8_decode(text);
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < cps.size()) {
    char32_t cp = cps[i];
    std::size_t pos = i;
    if (cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r') {
      ++i;
      continue;
    }
    if (cp == U'a' || cp == U'b' || cp == U'c' || cp == U'd' || cp == U'i') {
      tokens.push_back(Token{TokenKind::Var, 0, static_cast<char>(cp), pos});
      ++i;
      continue;
    }
    if (cp >= U'0' && cp <= U'9') {
      long long value = 0;
      while (i < cps.size() && cps[i] >= U'0' && cps[i] <= U'9') {
        if (cps[i] > U'3') throw ParseError(ParseCode::Lex, i, "digit outside 0-3");
        long long digit = static_cast<long long>(cps[i] - U'0');
        if (value > (std::numeric_limits<long long>::max() - digit) / 10)
          throw ParseError(ParseCode::Lex, i, "literal too large");
        value = value * 10 + digit;
        ++i;
      }
      tokens.push_back(Token{TokenKind::Literal, value, 0, pos});
      continue;
    }
    TokenKind kind;
    switch (cp) {
      case U'+': kind = TokenKind::Plus; break;
      case U'-': kind = TokenKind::Minus; break;
      case U'%': kind = TokenKind::Mod; break;
      case U'(': kind = TokenKind::LParen; break;
      case U')': kind = TokenKind::RParen; break;
      case U'>': kind = TokenKind::Gt; break;
      case U'<': kind = TokenKind::Lt; break;
      case U'=': kind = TokenKind::Eq; break;
      case kAndCp:
      case U'&': kind = TokenKind::And; break;
      case kOrCp:
      case U'|': kind = TokenKind::Or; break;
      case kNotCp:
      case U'!': kind = TokenKind::Not; break;
      default:
        throw ParseError(ParseCode::Lex, pos, "character outside the formula alphabet");
    }
    tokens.push_back(Token{kind, 0, 0, pos});
    ++i;
  }
  return tokens;
}

namespace {

FormulaAst binary(NodeKind kind, FormulaAst lhs, FormulaAst rhs) {
  FormulaAst node;
  node.kind = kind;
  node.children.push_back(std::move(lhs));
  node.children.push_back(std::move(rhs));
  return node;
}

FormulaAst unary(NodeKind kind, FormulaAst operand) {
  FormulaAst node;
  node.kind = kind;
  node.children.push_back(std::move(operand));
  return node;
}

class InfixParser {
 public:
  explicit InfixParser(const std::vector<Token>& tokens) : tokens_(tokens) {}

  FormulaAst run() {
    if (tokens_.empty()) throw ParseError(ParseCode::Syntax, 0, "empty formula");
    FormulaAst ast = parse_or();
    if (pos_ < tokens_.size())
      throw ParseError(ParseCode::Syntax, tokens_[pos_].pos, "unexpected token after formula");
    return ast;
  }

 private:
  bool at(TokenKind kind) const {
    return pos_ < tokens_.size() && tokens_[pos_].kind == kind;
  }

  [[noreturn]] void fail(const std::string& what) const {
    std::size_t pos = pos_ < tokens_.size() ? tokens_[pos_].pos : tokens_.back().pos + 1;
    throw ParseError(ParseCode::Syntax, pos, what);
  }

  FormulaAst parse_or() {
    FormulaAst node = parse_and();
    while (at(TokenKind::Or)) {
      ++pos_;
      node = binary(NodeKind::Or, std::move(node), parse_and());
    }
    return node;
  }

  FormulaAst parse_and() {
    FormulaAst node = parse_not();
    while (at(TokenKind::And)) {
      ++pos_;
      node = binary(NodeKind::And, std::move(node), parse_not());
    }
    return node;
  }

  FormulaAst parse_not() {
    if (at(TokenKind::Not)) {
      ++pos_;
      return unary(NodeKind::Not, parse_not());
    }
    return parse_comparison();
  }

  FormulaAst parse_comparison() {
    FormulaAst node = parse_additive();
    while (at(TokenKind::Lt) || at(TokenKind::Gt) || at(TokenKind::Eq)) {
      NodeKind kind = tokens_[pos_].kind == TokenKind::Lt   ? NodeKind::Lt
                      : tokens_[pos_].kind == TokenKind::Gt ? NodeKind::Gt
                                                            : NodeKind::Eq;
      ++pos_;
      node = binary(kind, std::move(node), parse_additive());
    }
    return node;
  }

  FormulaAst parse_additive() {
    FormulaAst node = parse_modulo();
    while (at(TokenKind::Plus) || at(TokenKind::Minus)) {
      NodeKind kind = tokens_[pos_].kind == TokenKind::Plus ? NodeKind::Add : NodeKind::Sub;
      ++pos_;
      node = binary(kind, std::move(node), parse_modulo());
    }
    return node;
  }

  FormulaAst parse_modulo() {
    FormulaAst node = parse_primary();
    while (at(TokenKind::Mod)) {
      ++pos_;
      node = binary(NodeKind::Mod, std::move(node), parse_primary());
    }
    return node;
  }

  FormulaAst parse_primary() {
    if (at(TokenKind::Var)) {
      FormulaAst node;
      node.kind = NodeKind::Var;
      node.var = tokens_[pos_].var;
      ++pos_;
      return node;
    }
    if (at(TokenKind::Literal)) {
      FormulaAst node;
      node.kind = NodeKind::Literal;
      node.value = tokens_[pos_].value;
      ++pos_;
      return node;
    }
    if (at(TokenKind::LParen)) {
      ++pos_;
      FormulaAst node = parse_or();
      if (!at(TokenKind::RParen)) fail("expected ')'");
      ++pos_;
      return node;
    }
    fail("expected a value");
  }

  const std::vector<Token>& tokens_;
  std::size_t pos_ = 0;
};

}  // namespace

FormulaAst parse_infix(const std::vector<Token>& tokens) { return InfixParser(tokens).run(); }

FormulaAst parse_rpn(const std::vector<Token>& tokens) {
  std::vector<FormulaAst> stack;
  auto pop = [&stack](std::size_t pos) {
    if (stack.empty()) throw ParseError(ParseCode::Syntax, pos, "postfix operand underflow");
    FormulaAst top = std::move(stack.back());
    stack.pop_back();
    return top;
  };
  for (const Token& token : tokens) {
    switch (token.kind) {
      case TokenKind::Var: {
        FormulaAst node;
        node.kind = NodeKind::Var;
        node.var = token.var;
        stack.push_back(std::move(node));
        break;
      }
      case TokenKind::Literal: {
        FormulaAst node;
        node.kind = NodeKind::Literal;
        node.value = token.value;
        stack.push_back(std::move(node));
        break;
      }
      case TokenKind::LParen:
      case TokenKind::RParen:
        throw ParseError(ParseCode::Syntax, token.pos, "parentheses are not postfix tokens");
      case TokenKind::Not: {
        FormulaAst operand = pop(token.pos);
        stack.push_back(unary(NodeKind::Not, std::move(operand)));
        break;
      }
      default: {
        NodeKind kind;
        switch (token.kind) {
          case TokenKind::Plus: kind = NodeKind::Add; break;
          case TokenKind::Minus: kind = NodeKind::Sub; break;
          case TokenKind::Mod: kind = NodeKind::Mod; break;
          case TokenKind::Lt: kind = NodeKind::Lt; break;
          case TokenKind::Gt: kind = NodeKind::Gt; break;
          case TokenKind::Eq: kind = NodeKind::Eq; break;
          case TokenKind::And: kind = NodeKind::And; break;
          default: kind = NodeKind::Or; break;
        }
        FormulaAst rhs = pop(token.pos);
        FormulaAst lhs = pop(token.pos);
        stack.push_back(binary(kind, std::move(lhs), std::move(rhs)));
        break;
      }
    }
  }
  if (stack.empty()) throw ParseError(ParseCode::Syntax, 0, "empty formula");
  if (stack.size() != 1)
    throw ParseError(ParseCode::Syntax, tokens.back().pos, "leftover postfix operands");
  return std::move(stack.front());
}

std::string notation_name(Notation notation) {
  switch (notation) {
    case Notation::Rpn: return "rpn";
    case Notation::Infix: return "infix";
    case Notation::InfixSpaced: return "infix_spaced";
  }
  throw InternalError("unknown notation");
}

std::optional<Notation> notation_from_name(std::string_view name) {
  if (name == "rpn") return Notation::Rpn;
  if (name == "infix") return Notation::Infix;
  if (name == "infix_spaced") return Notation::InfixSpaced;
  return std::nullopt;
}

FormulaAst parse_formula(std::string_view text, Notation notation) {
  auto tokens = tokenize(text);
  if (notation == Notation::Rpn) return parse_rpn(tokens);
  return parse_infix(tokens);
}

namespace {

std::string operator_symbol(NodeKind kind) {
  switch (kind) {
    case NodeKind::Add: return "+";
    case NodeKind::Sub: return "-";
    case NodeKind::Mod: return "%";
    case NodeKind::Lt: return "<";
    case NodeKind::Gt: return ">";
    case NodeKind::Eq: return "=";
    case NodeKind::And: return "∧";
    case NodeKind::Or: return "∨";
    case NodeKind::Not: return "¬";
    default: throw InternalError("operator symbol of a leaf");
  }
}

std::string leaf_text(const FormulaAst& node) {
  if (node.kind == NodeKind::Var) return std::string(1, node.var);
  return std::to_string(node.value);
}

bool is_leaf(const FormulaAst& node) {
  return node.kind == NodeKind::Var || node.kind == NodeKind::Literal;
}

void infix_tokens(const FormulaAst& node, bool parenthesize, std::vector<std::string>& out) {
  if (is_leaf(node)) {
    out.push_back(leaf_text(node));
    return;
  }
  if (parenthesize) out.push_back("(");
  if (node.kind == NodeKind::Not) {
    out.push_back(operator_symbol(NodeKind::Not));
    infix_tokens(node.children[0], !is_leaf(node.children[0]), out);
  } else {
    infix_tokens(node.children[0], !is_leaf(node.children[0]), out);
    out.push_back(operator_symbol(node.kind));
    infix_tokens(node.children[1], !is_leaf(node.children[1]), out);
  }
  if (parenthesize) out.push_back(")");
}

void rpn_tokens(const FormulaAst& node, std::vector<std::string>& out) {
  if (is_leaf(node)) {
    out.push_back(leaf_text(node));
    return;
  }
  for (const FormulaAst& child : node.children) rpn_tokens(child, out);
  out.push_back(operator_symbol(node.kind));
}

}  // namespace

std::string print(const FormulaAst& ast, Notation notation) {
  std::vector<std::string> tokens;
  if (notation == Notation::Rpn) {
    rpn_tokens(ast, tokens);
  } else {
    infix_tokens(ast, false, tokens);
  }
  std::string sep = notation == Notation::Infix ? "" : " ";
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out += sep;
    out += tokens[i];
  }
  return out;
}

void write_formula_file(const FormulaFile& file, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << "#notation: " << notation_name(file.notation) << "\n";
  for (const auto& line : file.lines) out << line << "\n";
  if (!out) throw Error("write failed: " + path);
}

FormulaFile read_formula_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw Error("empty formula file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::string prefix = "#notation:";
  if (line.rfind(prefix, 0) != 0) throw Error("missing #notation header: " + path);
  std::string name = line.substr(prefix.size());
  name.erase(0, name.find_first_not_of(' '));
  name.erase(name.find_last_not_of(' ') + 1);
  auto notation = notation_from_name(name);
  if (!notation) throw Error("unknown notation '" + name + "' in " + path);
  FormulaFile file;
  file.notation = *notation;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    file.lines.push_back(line);
  }
  return file;
}

}  // namespace qtn::dsl
