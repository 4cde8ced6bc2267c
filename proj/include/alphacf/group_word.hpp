#pragma once

// Words in PGL(2,Z) over S, T^n, V with a canonical form: V is pushed to the
// right, the PSL part is rewritten in the free product <S> * <U> (U = ST),
// reduced there and mapped back to S, T letters.

#include <string>
#include <vector>

#include "alphacf/exactnum.hpp"

namespace alphacf {

struct Letter {
  enum Kind { S, T, V } kind;
  long exp = 1;  // only meaningful for T

  friend bool operator==(const Letter&, const Letter&) = default;
};

struct GroupWord {
  std::vector<Letter> letters;

  GroupWord& s() {
    letters.push_back({Letter::S, 1});
    return *this;
  }
  GroupWord& t(long n) {
    if (n != 0) letters.push_back({Letter::T, n});
    return *this;
  }
  GroupWord& v() {
    letters.push_back({Letter::V, 1});
    return *this;
  }
  GroupWord& append(const GroupWord& w) {
    letters.insert(letters.end(), w.letters.begin(), w.letters.end());
    return *this;
  }

  bool empty() const { return letters.empty(); }
  friend bool operator==(const GroupWord&, const GroupWord&) = default;

  std::string to_string() const {
    if (letters.empty()) return "I";
    std::string out;
    for (const Letter& l : letters) {
      if (!out.empty()) out += " ";
      if (l.kind == Letter::S) out += "S";
      else if (l.kind == Letter::V) out += "V";
      else out += l.exp == 1 ? "T" : "T^" + std::to_string(l.exp);
    }
    return out;
  }
};

/// Integer matrix with S = [[0,-1],[1,0]], T = [[1,1],[0,1]], V = [[-1,0],[0,1]].
inline IntMatrix2 evaluate(const GroupWord& w) {
  IntMatrix2 m;
  for (const Letter& l : w.letters) {
    switch (l.kind) {
      case Letter::S: m = m * IntMatrix2::of(0, -1, 1, 0); break;
      case Letter::T: m = m * IntMatrix2{1, BigInt(l.exp), 0, 1}; break;
      case Letter::V: m = m * IntMatrix2::of(-1, 0, 0, 1); break;
    }
  }
  return m;
}

inline GroupWord word_normal_form(const GroupWord& w) {
  // V L = L' V with S' = S and (T^n)' = T^-n
  std::vector<Letter> psl;
  bool flip = false;
  for (const Letter& l : w.letters) {
    if (l.kind == Letter::V) {
      flip = !flip;
    } else if (l.kind == Letter::T) {
      if (l.exp != 0) psl.push_back({Letter::T, flip ? -l.exp : l.exp});
    } else {
      psl.push_back(l);
    }
  }

  // free product Z2 * Z3: 0 stands for S, 1 and 2 for U and U^2
  std::vector<int> stack;
  auto push = [&](int g) {
    if (g == 0) {
      if (!stack.empty() && stack.back() == 0) stack.pop_back();
      else stack.push_back(0);
      return;
    }
    if (!stack.empty() && stack.back() != 0) {
      int e = (stack.back() + g) % 3;
      stack.pop_back();
      if (e) stack.push_back(e);
    } else {
      stack.push_back(g);
    }
  };
  for (const Letter& l : psl) {
    if (l.kind == Letter::S) {
      push(0);
    } else if (l.exp > 0) {
      for (long i = 0; i < l.exp; ++i) { push(0); push(1); }  // T = S U
    } else {
      for (long i = 0; i < -l.exp; ++i) { push(2); push(0); }  // T^-1 = U^2 S
    }
  }

  // back to S, T: U = S T, U^2 = T^-1 S, then free reduction
  GroupWord out;
  auto emit_s = [&] {
    if (!out.letters.empty() && out.letters.back().kind == Letter::S) out.letters.pop_back();
    else out.letters.push_back({Letter::S, 1});
  };
  auto emit_t = [&](long n) {
    if (!out.letters.empty() && out.letters.back().kind == Letter::T) {
      out.letters.back().exp += n;
      if (out.letters.back().exp == 0) out.letters.pop_back();
    } else {
      out.letters.push_back({Letter::T, n});
    }
  };
  for (int g : stack) {
    if (g == 0) emit_s();
    else if (g == 1) { emit_s(); emit_t(1); }
    else { emit_t(-1); emit_s(); }
  }
  if (flip) out.letters.push_back({Letter::V, 1});
  return out;
}

inline bool words_equal(const GroupWord& a, const GroupWord& b) {
  return word_normal_form(a) == word_normal_form(b);
}

}  // namespace alphacf
