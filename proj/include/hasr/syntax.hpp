#pragma once

// Parenthesised prefix syntax for formulas of both languages.
//
//   formula := (bot) | (= t t) | (< t t) | (apart t t) | (in t S) | (seq S S)
//            | (and f f) | (or f f) | (imp f f) | (not f)
//            | (forall (x Sort) f) | (exists (x Sort) f)
//            | (existsN (x) f) | (forallN (x) f) | (existsR (x) f) | (forallR (x) f)
//   term    := natural | name | (+ t t) | (* t t) | (pair t t) | (succ t)
//            | (var name Sort) | (rconst name)
//   S       := (svar i) | (sconst i)
//
// A bare name takes the sort of its innermost binder, or the language's
// number sort when free (Nat for the source language, Real for the target).
// `;` starts a comment that runs to the end of the line.

#include <stdexcept>
#include <string>
#include <string_view>

#include "hasr/formula.hpp"

namespace hasr {

enum class Language { Source, Target };

std::string_view to_string(Language l);
Sort number_sort(Language l);

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(const std::string& msg, std::size_t offset, std::size_t line, std::size_t column);
  std::size_t offset() const noexcept { return offset_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t offset_, line_, column_;
};

Formula parse(std::string_view text, Language lang);
Term parse_term(std::string_view text, Language lang);

struct PrintOptions {
  /// Render (apart a b) as (or (< a b) (< b a)).
  bool unfold_apart = false;
};

std::string print(const Formula& f, PrintOptions opts = {});
std::string print(const Term& t);

/// Target if f mentions anything real-sorted or a defined quantifier.
Language infer_language(const Formula& f);

/// Throws SortError when f uses constructs foreign to `lang`.
void check_language(const Formula& f, Language lang);

/// Rewrites every (apart a b) into (or (< a b) (< b a)).
Formula unfold_apart(const Formula& f);

}  // namespace hasr
