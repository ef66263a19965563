// Copyright 2026 The entailrank Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// The Porter (1980) suffix-stripping stemmer for lowercase English words,
// following the structure of the reference ANSI C implementation, including
// its two departures (bli -> ble, logi -> log).

#include <string>
#include <string_view>

namespace entailrank {

class PorterStemmer {
 public:
  /// Stems a lowercase ASCII word. Words of length <= 2 are returned as is.
  std::string operator()(std::string_view word) const {
    State s{std::string(word), static_cast<int>(word.size()) - 1, 0};
    if (s.k <= 1) return s.b;
    step1ab(s);
    if (s.k > 0) {
      step1c(s);
      step2(s);
      step3(s);
      step4(s);
      step5(s);
    }
    s.b.resize(static_cast<std::size_t>(s.k + 1));
    return s.b;
  }

 private:
  struct State {
    std::string b;
    int k;  // offset of last character
    int j;  // general offset into the word
  };

  static bool cons(const State& s, int i) {
    switch (s.b[static_cast<std::size_t>(i)]) {
      case 'a': case 'e': case 'i': case 'o': case 'u':
        return false;
      case 'y':
        return i == 0 ? true : !cons(s, i - 1);
      default:
        return true;
    }
  }

  // Number of VC sequences in b[0..j].
  static int measure(const State& s) {
    int n = 0;
    int i = 0;
    while (true) {
      if (i > s.j) return n;
      if (!cons(s, i)) break;
      ++i;
    }
    ++i;
    while (true) {
      while (true) {
        if (i > s.j) return n;
        if (cons(s, i)) break;
        ++i;
      }
      ++i;
      ++n;
      while (true) {
        if (i > s.j) return n;
        if (!cons(s, i)) break;
        ++i;
      }
      ++i;
    }
  }

  static bool vowel_in_stem(const State& s) {
    for (int i = 0; i <= s.j; ++i)
      if (!cons(s, i)) return true;
    return false;
  }

  static bool double_cons(const State& s, int j) {
    if (j < 1) return false;
    if (s.b[static_cast<std::size_t>(j)] != s.b[static_cast<std::size_t>(j - 1)]) return false;
    return cons(s, j);
  }

  // consonant-vowel-consonant ending at i, where the last is not w, x or y.
  static bool cvc(const State& s, int i) {
    if (i < 2 || !cons(s, i) || cons(s, i - 1) || !cons(s, i - 2)) return false;
    char ch = s.b[static_cast<std::size_t>(i)];
    return !(ch == 'w' || ch == 'x' || ch == 'y');
  }

  static bool ends(State& s, std::string_view suffix) {
    int len = static_cast<int>(suffix.size());
    if (len > s.k + 1) return false;
    if (std::string_view(s.b).substr(static_cast<std::size_t>(s.k + 1 - len),
                                     static_cast<std::size_t>(len)) != suffix)
      return false;
    s.j = s.k - len;
    return true;
  }

  static void set_to(State& s, std::string_view repl) {
    s.b.resize(static_cast<std::size_t>(s.j + 1));
    s.b.append(repl);
    s.k = s.j + static_cast<int>(repl.size());
  }

  static void replace_if_measured(State& s, std::string_view repl) {
    if (measure(s) > 0) set_to(s, repl);
  }

  char at(const State& s, int i) const { return s.b[static_cast<std::size_t>(i)]; }

  // Plurals and -ed / -ing.
  void step1ab(State& s) const {
    if (at(s, s.k) == 's') {
      if (ends(s, "sses")) {
        s.k -= 2;
      } else if (ends(s, "ies")) {
        set_to(s, "i");
      } else if (at(s, s.k - 1) != 's') {
        --s.k;
      }
    }
    if (ends(s, "eed")) {
      if (measure(s) > 0) --s.k;
    } else if ((ends(s, "ed") || ends(s, "ing")) && vowel_in_stem(s)) {
      s.k = s.j;
      if (ends(s, "at")) {
        set_to(s, "ate");
      } else if (ends(s, "bl")) {
        set_to(s, "ble");
      } else if (ends(s, "iz")) {
        set_to(s, "ize");
      } else if (double_cons(s, s.k)) {
        --s.k;
        char ch = at(s, s.k);
        if (ch == 'l' || ch == 's' || ch == 'z') ++s.k;
      } else {
        s.j = s.k;
        if (measure(s) == 1 && cvc(s, s.k)) set_to(s, "e");
      }
    }
  }

  void step1c(State& s) const {
    if (ends(s, "y") && vowel_in_stem(s)) s.b[static_cast<std::size_t>(s.k)] = 'i';
  }

  void step2(State& s) const {
    struct Rule { std::string_view from, to; };
    static constexpr Rule rules[] = {
        {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"},   {"anci", "ance"},
        {"izer", "ize"},    {"bli", "ble"},     {"alli", "al"},      {"entli", "ent"},
        {"eli", "e"},       {"ousli", "ous"},   {"ization", "ize"},  {"ation", "ate"},
        {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"},  {"fulness", "ful"},
        {"ousness", "ous"}, {"aliti", "al"},    {"iviti", "ive"},    {"biliti", "ble"},
        {"logi", "log"},
    };
    apply_first(s, rules);
  }

  void step3(State& s) const {
    struct Rule { std::string_view from, to; };
    static constexpr Rule rules[] = {
        {"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
        {"ical", "ic"},  {"ful", ""},   {"ness", ""},
    };
    apply_first(s, rules);
  }

  // The first rule whose suffix matches decides; it fires only when the
  // remaining stem has measure > 0. Rules sharing a final letter pair are
  // listed in reference order.
  template <typename Rules>
  static void apply_first(State& s, const Rules& rules) {
    for (const auto& r : rules) {
      if (ends(s, r.from)) {
        replace_if_measured(s, r.to);
        return;
      }
    }
  }

  void step4(State& s) const {
    if (s.k < 1) return;
    switch (at(s, s.k - 1)) {
      case 'a':
        if (ends(s, "al")) break;
        return;
      case 'c':
        if (ends(s, "ance") || ends(s, "ence")) break;
        return;
      case 'e':
        if (ends(s, "er")) break;
        return;
      case 'i':
        if (ends(s, "ic")) break;
        return;
      case 'l':
        if (ends(s, "able") || ends(s, "ible")) break;
        return;
      case 'n':
        if (ends(s, "ant") || ends(s, "ement") || ends(s, "ment") || ends(s, "ent")) break;
        return;
      case 'o':
        if (ends(s, "ion") && s.j >= 0 && (at(s, s.j) == 's' || at(s, s.j) == 't')) break;
        if (ends(s, "ou")) break;
        return;
      case 's':
        if (ends(s, "ism")) break;
        return;
      case 't':
        if (ends(s, "ate") || ends(s, "iti")) break;
        return;
      case 'u':
        if (ends(s, "ous")) break;
        return;
      case 'v':
        if (ends(s, "ive")) break;
        return;
      case 'z':
        if (ends(s, "ize")) break;
        return;
      default:
        return;
    }
    if (measure(s) > 1) s.k = s.j;
  }

  void step5(State& s) const {
    s.j = s.k;
    if (at(s, s.k) == 'e') {
      int a = measure(s);
      if (a > 1 || (a == 1 && !cvc(s, s.k - 1))) --s.k;
    }
    if (at(s, s.k) == 'l' && double_cons(s, s.k) && measure(s) > 1) --s.k;
  }
};

}  // namespace entailrank
