#include <doctest.h>

#include "tad/oracle.hpp"

#include <cstdlib>
#include <thread>

using namespace tad;

namespace {

Vocabulary toy_vocab() {
    return Vocabulary::from_surfaces({"fact", "support", "filler"});
}

KnowledgeBase toy_kb() {
    return make_rule_kb({}, RuleTable({{"*", "filler", false}}, true));
}

// Rejects filler after any prefix, approves everything else.
Oracle toy_oracle() {
    return Oracle("toy", [](const Trace&, const Token& w, const std::vector<Fact>&) {
        return w.surface != "filler";
    });
}

std::vector<std::string> surfaces(const std::vector<Token>& tokens) {
    std::vector<std::string> out;
    for (const Token& t : tokens) out.push_back(t.surface);
    return out;
}

} // namespace

TEST_SUITE("oracle") {

TEST_CASE("safe set in vocabulary order") {
    const Vocabulary v = toy_vocab();
    CHECK(surfaces(safe_set(toy_oracle(), Trace{}, v)) ==
          std::vector<std::string>{"fact", "support"});

    const Oracle always_true("true", [](const Trace&, const Token&, const std::vector<Fact>&) {
        return true;
    });
    CHECK(safe_set(always_true, Trace{}, v).size() == v.size());

    const Oracle always_false("false", [](const Trace&, const Token&,
                                          const std::vector<Fact>&) { return false; });
    CHECK(safe_set(always_false, Trace{}, v).empty());
}

TEST_CASE("safe set tightens after the entailment-bearing token") {
    // deny d everywhere; after the prefix [a] only b (the entailed token)
    // survives
    const Vocabulary v = Vocabulary::from_surfaces({"a", "b", "c", "d"});
    const RuleTable table({{"*", "d", false}, {"a", "b", true}, {"a", "*", false}}, true);
    const Oracle o("worked", [table](const Trace& x, const Token& w,
                                     const std::vector<Fact>&) { return table.allows(x, w); });
    CHECK(surfaces(safe_set(o, Trace{}, v)) == std::vector<std::string>{"a", "b", "c"});
    CHECK(surfaces(safe_set(o, Trace({v.at(0)}), v)) == std::vector<std::string>{"b"});
}

TEST_CASE("safe set agrees with per-token re-query") {
    const Vocabulary v = toy_vocab();
    const Oracle o = toy_oracle();
    for (const Trace& prefix :
         {Trace{}, Trace({v.at(0)}), Trace({v.at(1), v.at(0)})}) {
        const std::vector<Token> s = safe_set(o, prefix, v);
        for (const Token& w : v) {
            const bool in_set = std::find(s.begin(), s.end(), w) != s.end();
            CHECK(in_set == o.judge(prefix, w));
        }
    }
}

TEST_CASE("soundness certification") {
    const Vocabulary v = toy_vocab();
    const KnowledgeBase kb = toy_kb();

    const OracleReport toy = check_soundness(toy_oracle(), kb, v, 3);
    CHECK(toy.sound);
    CHECK(toy.counterexamples.empty());

    // an oracle that additionally accepts filler is unsound, first caught at
    // the empty prefix
    const Oracle lax("lax", [](const Trace&, const Token&, const std::vector<Fact>&) {
        return true;
    });
    const OracleReport report = check_soundness(lax, kb, v, 3);
    CHECK(!report.sound);
    REQUIRE(!report.counterexamples.empty());
    CHECK(report.counterexamples.front().prefix.empty());
    CHECK(report.counterexamples.front().token.surface == "filler");
    CHECK(report.counterexamples.front().kind == "soundness");

    // vacuously sound: nothing accepted
    const Oracle never("never", [](const Trace&, const Token&, const std::vector<Fact>&) {
        return false;
    });
    CHECK(check_soundness(never, kb, v, 3).sound);
}

TEST_CASE("completeness certification") {
    const Vocabulary v = toy_vocab();
    const KnowledgeBase kb = toy_kb();

    CHECK(check_completeness(toy_oracle(), kb, v, 3).complete);

    // blind spot: rejects support right after fact
    const Oracle blinded("blinded", [](const Trace& x, const Token& w,
                                       const std::vector<Fact>&) {
        if (w.surface == "filler") return false;
        if (x.length() == 1 && x[0].surface == "fact" && w.surface == "support") return false;
        return true;
    });
    const OracleReport report = check_completeness(blinded, kb, v, 3);
    CHECK(!report.complete);
    REQUIRE(!report.counterexamples.empty());
    CHECK(report.counterexamples.front().prefix.joined_surfaces() == "fact");
    CHECK(report.counterexamples.front().token.surface == "support");

    const Oracle lax("lax", [](const Trace&, const Token&, const std::vector<Fact>&) {
        return true;
    });
    CHECK(check_completeness(lax, kb, v, 3).complete);
}

TEST_CASE("safe extension invariance for a sound oracle") {
    const Vocabulary v = toy_vocab();
    const KnowledgeBase kb = toy_kb();
    const Oracle o = toy_oracle();
    REQUIRE(check_soundness(o, kb, v, 4).sound);
    for (const Trace& x : enumerate_consistent(kb, v, 3)) {
        for (const Token& w : safe_set(o, x, v)) {
            CHECK(knowledge_consistent(x.append(w), kb));
        }
    }
}

TEST_CASE("enumeration budget") {
    const Vocabulary v = toy_vocab();
    const KnowledgeBase kb = toy_kb();
    // 3^13 > 10^6
    CHECK_THROWS_AS(check_soundness(toy_oracle(), kb, v, 13), BudgetExceededError);
    CHECK_THROWS_AS(enumerate_consistent(kb, v, 13), BudgetExceededError);

    // the environment variable overrides the cap
    setenv("TAD_ENUM_BUDGET", "10", 1);
    CHECK_THROWS_AS(enumerate_consistent(kb, v, 2), BudgetExceededError);
    setenv("TAD_ENUM_BUDGET", "2000000000", 1);
    CHECK_NOTHROW(enumerate_consistent(kb, v, 2));
    unsetenv("TAD_ENUM_BUDGET");

    setenv("TAD_ENUM_BUDGET", "bogus", 1);
    CHECK_THROWS_AS(enumeration_budget(), ValidationError);
    unsetenv("TAD_ENUM_BUDGET");
    CHECK(enumeration_budget() == 1'000'000);
}

TEST_CASE("memo cache answers repeats and tolerates concurrent use") {
    int evaluations = 0;
    const Oracle o("counting", [&evaluations](const Trace&, const Token& w,
                                              const std::vector<Fact>&) {
        ++evaluations;
        return w.surface != "filler";
    });
    o.set_memo_enabled(true);
    const Vocabulary v = toy_vocab();
    const Trace prefix;

    CHECK(o.judge(prefix, v.at(0)));
    CHECK(o.judge(prefix, v.at(0)));
    CHECK(o.judge(prefix, v.at(0)));
    CHECK(evaluations == 1);
    const Oracle::MemoStats stats = o.memo_stats();
    CHECK(stats.lookups == 3);
    CHECK(stats.hits == 2);
    CHECK(stats.evaluations == 1);

    // concurrent identical queries insert identical values
    o.reset_memo();
    evaluations = 0;
    std::vector<std::thread> threads;
    for (int i = 0; i < 4; ++i) {
        threads.emplace_back([&o, &v, &prefix] {
            for (int k = 0; k < 100; ++k) {
                CHECK(o.judge(prefix, v.at(k % 2)));
            }
        });
    }
    for (auto& t : threads) t.join();
    CHECK(o.memo_stats().lookups == 400);

    // overlay queries bypass the cache
    o.reset_memo();
    o.judge(prefix, v.at(0), {{"s", "r", "o", {}, {}}});
    CHECK(o.memo_stats().lookups == 0);
}

TEST_CASE("prefix judge defaults to all truncation steps") {
    const Vocabulary v = toy_vocab();
    const Oracle o = toy_oracle();
    CHECK(o.prefix_judge(Trace{}));
    CHECK(o.prefix_judge(Trace({v.at(0), v.at(1)})));
    CHECK(!o.prefix_judge(Trace({v.at(0), v.at(2)})));
    CHECK(!o.has_custom_prefix_judge());
}

TEST_CASE("coherence self-test for a custom prefix judge") {
    const Vocabulary v = toy_vocab();
    // coherent: recomputes the default rule
    const Oracle good("good",
                      [](const Trace&, const Token& w, const std::vector<Fact>&) {
                          return w.surface != "filler";
                      },
                      [](const Trace& t, const std::vector<Fact>&) {
                          for (const Token& w : t) {
                              if (w.surface == "filler") return false;
                          }
                          return true;
                      });
    CHECK(good.has_custom_prefix_judge());
    CHECK(check_prefix_coherence(good, v, 3).empty());

    // incoherent: the prefix judge waves everything through
    const Oracle bad("bad",
                     [](const Trace&, const Token& w, const std::vector<Fact>&) {
                         return w.surface != "filler";
                     },
                     [](const Trace&, const std::vector<Fact>&) { return true; });
    CHECK(!check_prefix_coherence(bad, v, 2).empty());
}

} // TEST_SUITE
