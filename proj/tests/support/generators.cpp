#include "generators.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace techmap::testkit {

extract::DocumentTerms doc_terms(const std::string& id, int year, std::vector<std::set<std::string>> sentences) {
    extract::DocumentTerms d;
    d.doc_id = id;
    d.year = year;
    d.sentences = std::move(sentences);
    return d;
}

extract::DocumentTerms random_document_terms(Rng& rng, int max_terms, int max_sentences, int vocab) {
    std::uniform_int_distribution<int> nterms(0, max_terms), nsent(1, max_sentences), word(0, vocab - 1);
    const int k = nterms(rng);
    const int s = nsent(rng);
    std::set<std::string> chosen;
    while (static_cast<int>(chosen.size()) < std::min(k, vocab)) chosen.insert("t" + std::to_string(word(rng)));

    extract::DocumentTerms d;
    d.doc_id = "r";
    d.year = 2015;
    d.sentences.resize(static_cast<std::size_t>(s));
    std::uniform_int_distribution<int> pick(0, s - 1);
    std::bernoulli_distribution extra(0.3);
    for (const auto& t : chosen) {
        d.sentences[static_cast<std::size_t>(pick(rng))].insert(t);
        for (auto& sent : d.sentences)
            if (extra(rng)) sent.insert(t);
    }
    return d;
}

std::vector<extract::DocumentTerms> random_corpus(Rng& rng, int docs, int first_year, int last_year, int vocab) {
    static const std::vector<std::string> words{"wireless", "sensor", "network", "cloud", "edge",
                                                "computing", "robot", "digital", "twin"};
    std::set<std::string> labels;
    std::uniform_int_distribution<std::size_t> w(0, words.size() - 1);
    std::uniform_int_distribution<int> len(1, 3);
    while (static_cast<int>(labels.size()) < vocab) {
        std::string label;
        const int n = len(rng);
        for (int i = 0; i < n; ++i) label += (i ? " " : "") + words[w(rng)];
        labels.insert(label);
    }
    const std::vector<std::string> vocabulary(labels.begin(), labels.end());

    std::vector<extract::DocumentTerms> out;
    std::uniform_int_distribution<int> year(first_year, last_year);
    for (int i = 0; i < docs; ++i) {
        auto d = random_document_terms(rng, 8, 4, vocab);
        d.doc_id = "doc" + std::to_string(i);
        d.year = year(rng);
        for (auto& s : d.sentences) {
            std::set<std::string> mapped;
            for (const auto& t : s) mapped.insert(vocabulary[std::stoul(t.substr(1))]);
            s = std::move(mapped);
        }
        out.push_back(std::move(d));
    }
    return out;
}

graph::TechnologyGraph make_graph(std::size_t n, const std::vector<EdgeSpec>& edges) {
    graph::PeriodScheme scheme({graph::Period{2020, 2021}});
    std::vector<graph::TermNode> nodes;
    for (std::size_t i = 0; i < n; ++i)
        nodes.push_back({static_cast<graph::NodeId>(i), "n" + std::to_string(i), {1, 0}});
    std::vector<graph::WeightedEdge> es;
    for (const auto& e : edges) {
        graph::WeightedEdge we;
        we.u = std::min(e.u, e.v);
        we.v = std::max(e.u, e.v);
        we.cooc_weight = e.w;
        we.period_cooc = {e.w, 0.0};
        es.push_back(we);
    }
    return graph::TechnologyGraph::from_parts(scheme, std::move(nodes), std::move(es), 0.0, 0);
}

graph::TechnologyGraph random_weighted_graph(Rng& rng, std::size_t n, double p, bool connected) {
    std::uniform_real_distribution<double> weight(0.1, 2.0);
    std::bernoulli_distribution coin(p);
    std::set<std::pair<graph::NodeId, graph::NodeId>> seen;
    std::vector<EdgeSpec> edges;
    auto add = [&](graph::NodeId a, graph::NodeId b) {
        if (a == b) return;
        if (a > b) std::swap(a, b);
        if (seen.insert({a, b}).second) edges.push_back({a, b, weight(rng)});
    };
    if (connected) {
        std::vector<graph::NodeId> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t i = 1; i < n; ++i) {
            std::uniform_int_distribution<std::size_t> parent(0, i - 1);
            add(order[i], order[parent(rng)]);
        }
    }
    for (graph::NodeId a = 0; a < n; ++a)
        for (graph::NodeId b = a + 1; b < n; ++b)
            if (coin(rng)) add(a, b);
    return make_graph(n, edges);
}

graph::TechnologyGraph two_cliques(std::size_t k, double bridge) {
    std::vector<EdgeSpec> edges;
    for (std::size_t c = 0; c < 2; ++c)
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = a + 1; b < k; ++b)
                edges.push_back({static_cast<graph::NodeId>(c * k + a), static_cast<graph::NodeId>(c * k + b), 1.0});
    edges.push_back({static_cast<graph::NodeId>(k - 1), static_cast<graph::NodeId>(k), bridge});
    return make_graph(2 * k, edges);
}

graph::TechnologyGraph star(std::size_t leaves) {
    std::vector<EdgeSpec> edges;
    for (std::size_t i = 1; i <= leaves; ++i) edges.push_back({0, static_cast<graph::NodeId>(i), 1.0});
    return make_graph(leaves + 1, edges);
}

Planted planted_partition(Rng& rng, std::size_t blocks, std::size_t block_size, double p_in, double p_out) {
    const std::size_t n = blocks * block_size;
    Planted out;
    for (std::size_t i = 0; i < n; ++i) out.block.push_back(static_cast<int>(i / block_size));
    std::bernoulli_distribution in(p_in), across(p_out);
    std::vector<EdgeSpec> edges;
    for (graph::NodeId a = 0; a < n; ++a)
        for (graph::NodeId b = a + 1; b < n; ++b)
            if (out.block[a] == out.block[b] ? in(rng) : across(rng)) edges.push_back({a, b, 1.0});
    out.graph = make_graph(n, edges);
    return out;
}

analyze::ClusterAssignment assignment(std::vector<int> membership) {
    analyze::ClusterAssignment c;
    c.membership = std::move(membership);
    return c;
}

} // namespace techmap::testkit
