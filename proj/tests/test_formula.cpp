#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "qtn/errors.hpp"
#include "qtn/formula.hpp"
#include "qtn/rng.hpp"
#include "qtn/slurp.hpp"
#include "qtn/statistics.hpp"
#include "qtn/symbolic.hpp"

using namespace qtn;
using dsl::EvalEnv;
using dsl::FormulaAst;
using dsl::Notation;

namespace {

std::optional<long long> eval_text(const std::string& text, EvalEnv env = {}) {
  return dsl::eval(dsl::parse_formula(text), env);
}

ParseCode parse_code_of(const std::string& text, Notation notation = Notation::Infix) {
  try {
    dsl::parse_formula(text, notation);
  } catch (const ParseError& e) {
    return e.code;
  }
  throw std::runtime_error("expected ParseError for: " + text);
}

}  // namespace

TEST_SUITE("formula") {
  TEST_CASE("utf8 helpers agree with each other") {
    CHECK(dsl::codepoint_length("( b < i ) ∧ 2") == 13);
    CHECK(dsl::utf8_decode("∧").size() == 1);
    std::string out;
    for (char32_t cp : dsl::utf8_decode("a¬∨∧b"))
      dsl::utf8_append(out, cp);
    CHECK(out == "a¬∨∧b");
  }

  TEST_CASE("tokenizing a small formula pins kinds and positions") {
    auto tokens = dsl::tokenize("(b<i)∧2");
    REQUIRE(tokens.size() == 7);
    CHECK(tokens[0].kind == dsl::TokenKind::LParen);
    CHECK(tokens[1].kind == dsl::TokenKind::Var);
    CHECK(tokens[1].var == 'b');
    CHECK(tokens[2].kind == dsl::TokenKind::Lt);
    CHECK(tokens[3].kind == dsl::TokenKind::Var);
    CHECK(tokens[3].var == 'i');
    CHECK(tokens[4].kind == dsl::TokenKind::RParen);
    CHECK(tokens[5].kind == dsl::TokenKind::And);
    CHECK(tokens[6].kind == dsl::TokenKind::Literal);
    CHECK(tokens[6].value == 2);
    for (std::size_t i = 0; i < tokens.size(); ++i) CHECK(tokens[i].pos == i);
  }

  TEST_CASE("ascii aliases spell the same operators") {
    CHECK(dsl::parse_formula("!0") == dsl::parse_formula("¬0"));
    CHECK(dsl::parse_formula("a|b") == dsl::parse_formula("a∨b"));
    CHECK(dsl::parse_formula("a&b") == dsl::parse_formula("a∧b"));
  }

  TEST_CASE("digits above three are lexical errors with a position") {
    for (const char* text : {"4", "a+5", "19"}) {
      CHECK_THROWS_AS(dsl::tokenize(text), ParseError);
    }
    try {
      dsl::tokenize("a+4");
      FAIL("no error");
    } catch (const ParseError& e) {
      CHECK(e.code == ParseCode::Lex);
      CHECK(e.pos == 2);
    }
    try {
      dsl::tokenize("¬¬e");
      FAIL("no error");
    } catch (const ParseError& e) {
      CHECK(e.code == ParseCode::Lex);
      CHECK(e.pos == 2);  // codepoints, not bytes
    }
  }

  TEST_CASE("multi-digit literals from the restricted digits are fine") {
    CHECK(dsl::tokenize("10")[0].value == 10);
    CHECK(dsl::tokenize("23")[0].value == 23);
    CHECK(dsl::tokenize("0%30+10∨12").size() == 7);
    CHECK(dsl::tokenize("1 0").size() == 2);  // whitespace separates literals
    CHECK(eval_text("100+23") == 123);
  }

  TEST_CASE("evaluation follows floored modulo and the precedence ladder") {
    CHECK(eval_text("(1-3)%3") == 1);
    CHECK(eval_text("(0-1)%2") == 1);
    CHECK(eval_text("3%2") == 1);
    CHECK(eval_text("1+2%3") == 3);      // % binds tighter than +
    CHECK(eval_text("3>2>1") == 0);      // comparisons associate left
    CHECK(eval_text("1<2=1") == 1);
    CHECK(eval_text("2-1-1") == 0);      // additive associates left
    CHECK(eval_text("¬0") == 1);
    CHECK(eval_text("¬3") == 0);
    CHECK(eval_text("¬¬3") == 1);
    // The prefix operator sits between the logic and comparison levels.
    CHECK(eval_text("¬a<b", {.a = 1, .b = 2}) == 0);
    CHECK(eval_text("a∧b∨0%1", {.a = 0, .b = 5}) == 0);
    CHECK(eval_text("a∧b∨c", {.a = 0, .b = 5, .c = 7}) == 7);
  }

  TEST_CASE("logic keeps operand values the way Python does") {
    CHECK(eval_text("a∧b", {.a = 0, .b = 5}) == 0);
    CHECK(eval_text("a∧b", {.a = 2, .b = 5}) == 5);
    CHECK(eval_text("a∨b", {.a = 0, .b = 7}) == 7);
    CHECK(eval_text("a∨b", {.a = 2, .b = 9}) == 2);
  }

  TEST_CASE("failures propagate except across a short circuit") {
    CHECK(eval_text("1%0") == std::nullopt);
    CHECK(eval_text("1%(0-2)") == std::nullopt);  // divisor must be positive
    CHECK(eval_text("0∧(1%0)") == 0);
    CHECK(eval_text("2∨(1%0)") == 2);
    CHECK(eval_text("1∧(1%0)") == std::nullopt);
    CHECK(eval_text("0∨(1%0)") == std::nullopt);
    CHECK(eval_text("¬(1%0)") == std::nullopt);
    long long big = 5'000'000'000'000'000'000;
    CHECK(eval_text("a+a", {.a = big}) == std::nullopt);  // 64-bit overflow
    CHECK(eval_text("0-a-a", {.a = big}) == std::nullopt);
  }

  TEST_CASE("syntax errors are reported as such") {
    CHECK(parse_code_of("") == ParseCode::Syntax);
    CHECK(parse_code_of("(a") == ParseCode::Syntax);
    CHECK(parse_code_of("a+") == ParseCode::Syntax);
    CHECK(parse_code_of(")") == ParseCode::Syntax);
    CHECK(parse_code_of("a b") == ParseCode::Syntax);
    CHECK(parse_code_of("a)") == ParseCode::Syntax);
    CHECK(parse_code_of("a b", Notation::Rpn) == ParseCode::Syntax);
    CHECK(parse_code_of("+", Notation::Rpn) == ParseCode::Syntax);
  }

  TEST_CASE("notations are named consistently") {
    CHECK(dsl::notation_name(Notation::Rpn) == "rpn");
    CHECK(dsl::notation_name(Notation::Infix) == "infix");
    CHECK(dsl::notation_name(Notation::InfixSpaced) == "infix_spaced");
    for (Notation n : {Notation::Rpn, Notation::Infix, Notation::InfixSpaced})
      CHECK(dsl::notation_from_name(dsl::notation_name(n)) == n);
    CHECK_FALSE(dsl::notation_from_name("bogus").has_value());
  }

  TEST_CASE("printing pins the three notations for one formula") {
    FormulaAst ast = dsl::parse_formula("(b<i)∧2");
    CHECK(dsl::print(ast, Notation::Infix) == "(b<i)∧2");
    CHECK(dsl::print(ast, Notation::InfixSpaced) == "( b < i ) ∧ 2");
    CHECK(dsl::print(ast, Notation::Rpn) == "b i < 2 ∧");
    CHECK(dsl::parse_formula("( b < i ) ∧ 2", Notation::InfixSpaced) == ast);
    CHECK(dsl::parse_formula("b i < 2 ∧", Notation::Rpn) == ast);
  }

  TEST_CASE("compound operands always get parentheses") {
    CHECK(dsl::print(dsl::parse_formula("a+b%3"), Notation::Infix) == "a+(b%3)");
    CHECK(dsl::print(dsl::parse_formula("a+b+c"), Notation::Infix) == "(a+b)+c");
    CHECK(dsl::print(dsl::parse_formula("(b+d)%3"), Notation::Infix) == "(b+d)%3");
    CHECK(dsl::print(dsl::parse_formula("¬a"), Notation::Infix) == "¬a");
    CHECK(dsl::print(dsl::parse_formula("¬(a+b)"), Notation::Infix) == "¬(a+b)");
  }

  TEST_CASE("every sampled formula round-trips through all three notations") {
    std::size_t seen = 0;
    for (const auto& cfg : presets()) {
      auto pop = init_population(cfg, 600, Rng(99));
      for (const auto& cand : pop) {
        CHECK(dsl::parse_formula(cand.text) == cand.ast);
        for (Notation n : {Notation::Rpn, Notation::Infix, Notation::InfixSpaced}) {
          std::string printed = dsl::print(cand.ast, n);
          CHECK(dsl::parse_formula(printed, n) == cand.ast);
        }
        std::size_t len = dsl::codepoint_length(cand.text);
        CHECK(len >= static_cast<std::size_t>(cfg.min_len));
        CHECK(len <= static_cast<std::size_t>(cfg.max_len));
        ++seen;
      }
    }
    CHECK(seen == presets().size() * 600);
  }

  TEST_CASE("formula files carry their notation in a header") {
    namespace fs = std::filesystem;
    fs::path path = fs::temp_directory_path() / "qtn_formula_file.txt";
    dsl::FormulaFile file;
    file.notation = Notation::Rpn;
    file.lines = {"b i < 2 ∧", "a b +"};
    dsl::write_formula_file(file, path.string());
    dsl::FormulaFile back = dsl::read_formula_file(path.string());
    CHECK(back.notation == Notation::Rpn);
    CHECK(back.lines == file.lines);
    std::remove(path.string().c_str());

    fs::path bad = fs::temp_directory_path() / "qtn_formula_bad.txt";
    std::ofstream(bad) << "a+b\n";
    CHECK_THROWS_AS(dsl::read_formula_file(bad.string()), Error);
    std::ofstream(bad, std::ios::trunc) << "#notation: sideways\na+b\n";
    CHECK_THROWS_AS(dsl::read_formula_file(bad.string()), Error);
    std::remove(bad.string().c_str());
    CHECK_THROWS_AS(dsl::read_formula_file(bad.string()), Error);
  }

  TEST_CASE("a formula value is the sum of the row evaluations") {
    using Tuple = std::array<long long, 4>;
    FormulaAst ast = dsl::parse_formula("a");
    CHECK(dsl::apply(ast, Tuple{7, 0, 0, 0}, 5) == 35);  // n copies of a
    ast = dsl::parse_formula("i");
    CHECK(dsl::apply(ast, Tuple{0, 0, 0, 0}, 6) == 21);
    ast = dsl::parse_formula("i%0");
    CHECK(dsl::apply(ast, Tuple{0, 0, 0, 0}, 4) == std::nullopt);
  }

  TEST_CASE("fingerprints group formulas by their value vectors") {
    SlurpInstance inst = build_instance(6, 3, false);
    dsl::InstanceEnvs envs = dsl::InstanceEnvs::of(inst);
    CHECK(envs.n == 6);
    CHECK(envs.tuples.size() == inst.size());

    dsl::Fingerprint fp1 = dsl::fingerprint(dsl::parse_formula("b+d"), envs);
    dsl::Fingerprint fp2 = dsl::fingerprint(dsl::parse_formula("d+b"), envs);
    CHECK_FALSE(fp1.invalid);
    CHECK(fp1.values.size() == inst.size());
    CHECK(fp1 == fp2);
    CHECK_FALSE(fp1 == dsl::fingerprint(dsl::parse_formula("b+d+1"), envs));

    dsl::Fingerprint broken = dsl::fingerprint(dsl::parse_formula("1%0"), inst);
    CHECK(broken.invalid);
  }

  TEST_CASE("formula distance is zero exactly on a planted formula") {
    SlurpInstance base = build_instance(6, 3, false);
    dsl::InstanceEnvs envs = dsl::InstanceEnvs::of(base);
    FormulaAst planted = dsl::parse_formula("(b+d)%3");
    dsl::Fingerprint fp = dsl::fingerprint(planted, envs);
    REQUIRE_FALSE(fp.invalid);
    SlurpInstance inst = instance_from_values(6, 3, false, fp.values);
    CHECK(dsl::formula_delta(planted, inst, envs) == Distance{0, false});
    CHECK(dsl::formula_delta(dsl::parse_formula("(b+d+1)%3"), inst, envs) >
          Distance{0, false});
    CHECK(dsl::formula_delta(dsl::parse_formula("1%0"), inst, envs) ==
          Distance::infinite());
  }
}
