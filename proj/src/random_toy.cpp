#include "tad/random_toy.hpp"

#include <cmath>
#include <random>
#include <unordered_map>
#include <unordered_set>

namespace tad {

namespace {

using AllowMap = std::unordered_map<std::string, bool>;

std::string edge_key(const Trace& prefix, const Token& w) {
    return prefix.id_key() + "|" + std::to_string(w.id);
}

void enumerate_prefixes(const Vocabulary& vocab, int max_len, const Trace& current,
                        std::vector<Trace>& out) {
    out.push_back(current);
    if (max_len == 0) return;
    for (const Token& w : vocab) {
        enumerate_prefixes(vocab, max_len - 1, current.append(w), out);
    }
}

} // namespace

RandomToy make_random_toy(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> vocab_size_dist(2, 6);
    std::uniform_int_distribution<int> max_len_dist(2, 5);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const int n = vocab_size_dist(rng);
    const int max_len = max_len_dist(rng);
    std::vector<std::string> surfaces;
    for (int i = 0; i < n; ++i) surfaces.push_back("t" + std::to_string(i));
    Vocabulary vocab = Vocabulary::from_surfaces(surfaces);

    // Admissible extension steps for every prefix up to max_len - 1;
    // anything longer is inadmissible, keeping the sequence set finite.
    std::vector<Trace> prefixes;
    enumerate_prefixes(vocab, max_len - 1, Trace{}, prefixes);

    const double allow_probability = 0.45 + 0.45 * unit(rng);
    AllowMap allow;
    for (const Trace& p : prefixes) {
        for (const Token& w : vocab) {
            allow[edge_key(p, w)] = unit(rng) < allow_probability;
        }
    }
    // Guarantee a non-trivial decode: some token is admissible at the
    // empty prefix.
    {
        bool any = false;
        for (const Token& w : vocab) any = any || allow[edge_key(Trace{}, w)];
        if (!any) {
            std::uniform_int_distribution<int> pick(0, n - 1);
            allow[edge_key(Trace{}, vocab.at(pick(rng)))] = true;
        }
    }

    auto step_allowed = [allow](const Trace& prefix, const Token& w) {
        auto it = allow.find(edge_key(prefix, w));
        return it != allow.end() && it->second;
    };

    KnowledgeBase kb(
        {}, [step_allowed](const Trace& trace, const std::vector<Fact>&) {
            for (std::size_t s = 1; s <= trace.length(); ++s) {
                if (!step_allowed(trace.take(s - 1), trace[s - 1])) return false;
            }
            return true;
        });

    Oracle oracle("random_toy",
                  [step_allowed](const Trace& prefix, const Token& w,
                                 const std::vector<Fact>&) { return step_allowed(prefix, w); });

    // Fully tabulated distribution: one random vector per enumerable
    // prefix, uniform fallback for anything beyond.
    std::unordered_map<std::string, std::vector<double>> contexts;
    for (const Trace& p : prefixes) {
        std::vector<double> v(static_cast<std::size_t>(n));
        double sum = 0.0;
        for (double& x : v) {
            x = -std::log(1.0 - unit(rng)); // exponential draws, normalized below
            sum += x;
        }
        for (double& x : v) x /= sum;
        contexts[p.joined_surfaces()] = std::move(v);
    }
    std::vector<double> uniform(static_cast<std::size_t>(n), 1.0 / n);
    ScoringModel model(vocab, ContextMode::Exact, true, std::move(contexts), uniform);

    return RandomToy{std::move(vocab), std::move(kb), std::move(oracle), std::move(model),
                     max_len};
}

BlindedOracle blind_one_truthful_pair(const RandomToy& toy) {
    for (const Trace& p : enumerate_consistent(toy.kb, toy.vocab, toy.max_len - 1)) {
        for (const Token& w : toy.vocab) {
            if (!toy.kb.contains(p.append(w))) continue;
            const Oracle& base = toy.oracle;
            const Trace blind_prefix = p;
            const Token blind_token = w;
            Oracle blinded(
                "random_toy(blinded)",
                [base, blind_prefix, blind_token](const Trace& prefix, const Token& token,
                                                  const std::vector<Fact>& extra) {
                    if (prefix == blind_prefix && token == blind_token) return false;
                    return base.judge(prefix, token, extra);
                });
            return BlindedOracle{std::move(blinded), p, w};
        }
    }
    throw ValidationError("no truthful pair exists to blind (empty knowledge base?)");
}

} // namespace tad
