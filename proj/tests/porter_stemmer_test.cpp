// Copyright 2026 The flaketype Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "flaketype/porter_stemmer.hpp"

#include <gtest/gtest.h>

#include <string_view>
#include <utility>

namespace flaketype {
namespace {

// Frozen from tests/oracles/porter_reference.py (NLTK, original algorithm).
constexpr std::pair<std::string_view, std::string_view> kReference[] = {
    {"caresses", "caress"},
    {"ponies", "poni"},
    {"ties", "ti"},
    {"caress", "caress"},
    {"cats", "cat"},
    {"feed", "feed"},
    {"agreed", "agre"},
    {"plastered", "plaster"},
    {"bled", "bled"},
    {"motoring", "motor"},
    {"sing", "sing"},
    {"conflated", "conflat"},
    {"troubled", "troubl"},
    {"sized", "size"},
    {"hopping", "hop"},
    {"tanned", "tan"},
    {"falling", "fall"},
    {"hissing", "hiss"},
    {"fizzed", "fizz"},
    {"failing", "fail"},
    {"filing", "file"},
    {"happy", "happi"},
    {"sky", "sky"},
    {"relational", "relat"},
    {"conditional", "condit"},
    {"rational", "ration"},
    {"valenci", "valenc"},
    {"hesitanci", "hesit"},
    {"digitizer", "digit"},
    {"conformabli", "conform"},
    {"radicalli", "radic"},
    {"differentli", "differ"},
    {"vileli", "vile"},
    {"analogousli", "analog"},
    {"vietnamization", "vietnam"},
    {"predication", "predic"},
    {"operator", "oper"},
    {"feudalism", "feudal"},
    {"decisiveness", "decis"},
    {"hopefulness", "hope"},
    {"callousness", "callous"},
    {"formaliti", "formal"},
    {"sensitiviti", "sensit"},
    {"sensibiliti", "sensibl"},
    {"triplicate", "triplic"},
    {"formative", "form"},
    {"formalize", "formal"},
    {"electriciti", "electr"},
    {"electrical", "electr"},
    {"hopeful", "hope"},
    {"goodness", "good"},
    {"revival", "reviv"},
    {"allowance", "allow"},
    {"inference", "infer"},
    {"airliner", "airlin"},
    {"gyroscopic", "gyroscop"},
    {"adjustable", "adjust"},
    {"defensible", "defens"},
    {"irritant", "irrit"},
    {"replacement", "replac"},
    {"adjustment", "adjust"},
    {"dependent", "depend"},
    {"adoption", "adopt"},
    {"homologou", "homolog"},
    {"communism", "commun"},
    {"activate", "activ"},
    {"angulariti", "angular"},
    {"homologous", "homolog"},
    {"effective", "effect"},
    {"bowdlerize", "bowdler"},
    {"probate", "probat"},
    {"rate", "rate"},
    {"cease", "ceas"},
    {"controll", "control"},
    {"roll", "roll"},
    {"generalizations", "gener"},
    {"oscillators", "oscil"},
    {"assert", "assert"},
    {"equals", "equal"},
    {"expected", "expect"},
    {"time", "time"},
    {"expect", "expect"},
    {"thread", "thread"},
    {"sleep", "sleep"},
    {"executor", "executor"},
    {"runnable", "runnabl"},
    {"await", "await"},
    {"waiting", "wait"},
    {"timeout", "timeout"},
    {"millis", "milli"},
    {"current", "current"},
    {"milliseconds", "millisecond"},
    {"seconds", "second"},
    {"connection", "connect"},
    {"connections", "connect"},
    {"socket", "socket"},
    {"server", "server"},
    {"client", "client"},
    {"database", "databas"},
    {"assertion", "assert"},
    {"assertions", "assert"},
    {"verify", "verifi"},
    {"verifying", "verifi"},
    {"running", "run"},
    {"started", "start"},
    {"stopping", "stop"},
    {"listener", "listen"},
    {"listeners", "listen"},
    {"iterator", "iter"},
    {"iterators", "iter"},
    {"collection", "collect"},
    {"collections", "collect"},
    {"ordered", "order"},
    {"unordered", "unord"},
    {"random", "random"},
    {"randomly", "randomli"},
    {"network", "network"},
    {"networking", "network"},
    {"files", "file"},
    {"calendar", "calendar"},
    {"dates", "date"},
    {"instant", "instant"},
    {"duration", "durat"},
    {"synchronized", "synchron"},
    {"latch", "latch"},
    {"countdown", "countdown"},
    {"future", "futur"},
    {"futures", "futur"},
    {"completable", "complet"},
    {"executed", "execut"},
    {"execution", "execut"},
    {"interrupted", "interrupt"},
    {"joined", "join"},
    {"interrupt", "interrupt"},
    {"test", "test"},
    {"testing", "test"},
    {"tested", "test"},
    {"get", "get"},
    {"set", "set"},
    {"value", "valu"},
    {"values", "valu"},
    {"result", "result"},
    {"results", "result"},
    {"exception", "except"},
    {"exceptions", "except"},
};

TEST(PorterStemmer, MatchesReferenceImplementation) {
  for (const auto& [word, stem] : kReference) {
    EXPECT_EQ(porter_stem(word), stem) << "word: " << word;
  }
}

TEST(PorterStemmer, ShortWordsUnchanged) {
  EXPECT_EQ(porter_stem(""), "");
  EXPECT_EQ(porter_stem("x"), "x");
  EXPECT_EQ(porter_stem("is"), "is");
}

TEST(PorterStemmer, Idempotent) {
  for (const auto& [word, stem] : kReference) {
    (void)word;
    std::string once = porter_stem(stem);
    EXPECT_EQ(porter_stem(once), once);
  }
}

}  // namespace
}  // namespace flaketype
