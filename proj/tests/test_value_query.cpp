#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "cardest/errors.hpp"
#include "cardest/query.hpp"
#include "cardest/value.hpp"
#include "fixtures.hpp"

using namespace cardest;

TEST(Value, PredicatesAndCoercion) {
    EXPECT_TRUE(eval_predicate(Scalar{std::int64_t{3}}, Predicate::EQ, Operand{Scalar{3.0}}));
    EXPECT_TRUE(eval_predicate(Scalar{std::int64_t{3}}, Predicate::LT, Operand{Scalar{3.5}}));
    EXPECT_TRUE(eval_predicate(Scalar{std::string("abc")}, Predicate::LT, Operand{Scalar{std::string("abd")}}));
    EXPECT_TRUE(eval_predicate(Scalar{std::string("Tim Burton")}, Predicate::CONTAINS, Operand{Scalar{std::string("Tim")}}));
    EXPECT_FALSE(eval_predicate(Scalar{std::string("tim")}, Predicate::CONTAINS, Operand{Scalar{std::string("Tim")}}));
    EXPECT_TRUE(eval_predicate(Scalar{std::string("b")}, Predicate::IN,
                               Operand{std::vector<Scalar>{std::string("a"), std::string("b")}}));
}

TEST(Value, CrossTypeIsUnsatisfiedNotError) {
    EXPECT_FALSE(eval_predicate(Scalar{std::string("3")}, Predicate::EQ, Operand{Scalar{std::int64_t{3}}}));
    EXPECT_FALSE(eval_predicate(Scalar{std::int64_t{3}}, Predicate::CONTAINS, Operand{Scalar{std::string("3")}}));
    EXPECT_FALSE(eval_predicate(Scalar{true}, Predicate::LT, Operand{Scalar{std::int64_t{3}}}));
}

TEST(Value, PredicateSymbolsRoundTrip) {
    for (auto p : {Predicate::EQ, Predicate::NEQ, Predicate::LT, Predicate::LEQ, Predicate::GT, Predicate::GEQ, Predicate::IN,
                   Predicate::CONTAINS})
        EXPECT_EQ(parse_predicate(predicate_symbol(p)), p);
    EXPECT_THROW(parse_predicate("~="), ParseError);
}

TEST(Query, Job18aShape) {
    auto doc = fixtures::job18a_document();
    const auto& q = doc.pattern;
    EXPECT_EQ(q.vertices.size(), 5u);
    EXPECT_EQ(q.edges.size(), 4u);
    std::size_t labels = 0;
    for (const auto& id : q.ids()) labels += q.labels_of(id).size();
    EXPECT_EQ(labels, 9u);
    EXPECT_EQ(q.props.size(), 3u);
    EXPECT_EQ(extract_constraints(q).size(), 32u);
}

TEST(Query, SingleVertexAndErrors) {
    auto q = parse_query(R"({"vertices":[{"id":"a"}]})");
    EXPECT_EQ(q.size(), 1u);
    EXPECT_THROW(parse_query(R"({"vertices":[{"id":"a"}],"edges":[{"id":"e","src":"x","trg":"a"}]})"), ParseError);
    EXPECT_THROW(parse_query(R"({"vertices":[{"id":"a","props":[{"key":"k","op":"LIKE","value":1}]}]})"), ParseError);
    EXPECT_THROW(parse_query(R"({"vertices":[{"id":"a","props":[{"key":"k","op":"IN","value":1}]}]})"), ParseError);
}

TEST(Query, SingleEdgeConstraints) {
    auto cs = extract_constraints(fixtures::g4_query());
    ConstraintSet want{Constraint::vertex("q1"), Constraint::vertex("q3"), Constraint::edge("q2"),
                       Constraint::src("q1", "q2"), Constraint::trg("q3", "q2")};
    EXPECT_EQ(cs, want);
}

TEST(Query, TwoPropsOnOneVertex) {
    auto q = parse_query(R"({"vertices":[{"id":"a","props":[{"key":"x","op":"=","value":1},{"key":"y","op":"<","value":2}]}]})");
    EXPECT_EQ(extract_constraints(q).size(), 5u);
}

TEST(Query, ImpliedClosureExamples) {
    auto q = fixtures::g4_query();
    q.props.push_back({"q1", "k", Predicate::EQ, Operand{Scalar{std::int64_t{5}}}});
    auto s = implied_closure({Constraint::src("q1", "q2")}, q);
    EXPECT_EQ(s, (ConstraintSet{Constraint::src("q1", "q2"), Constraint::vertex("q1"), Constraint::edge("q2")}));
    EXPECT_EQ(implied_closure({Constraint::vertex("q1")}, q), ConstraintSet{Constraint::vertex("q1")});
    auto pv = Constraint::prop_value("q1", "k", Predicate::EQ, Operand{Scalar{std::int64_t{5}}});
    EXPECT_TRUE(implied_closure({pv}, q).count(Constraint::has_key("q1", "k")));
}

TEST(Query, ClosurePropertiesOnRandomQueries) {
    std::mt19937_64 rng(7);
    auto g = fixtures::random_graph(rng);
    for (int t = 0; t < 100; ++t) {
        auto q = fixtures::random_query(rng, g, 4);
        auto all = extract_constraints(q);
        std::vector<Constraint> v(all.begin(), all.end());
        std::shuffle(v.begin(), v.end(), rng);
        ConstraintSet s(v.begin(), v.begin() + static_cast<long>(v.size() / 2));
        auto c = implied_closure(s, q);
        EXPECT_TRUE(is_subset(s, c));
        EXPECT_TRUE(is_subset(c, all));
        EXPECT_EQ(implied_closure(c, q), c);
        ConstraintSet bigger = s;
        bigger.insert(v.back());
        EXPECT_TRUE(is_subset(c, implied_closure(bigger, q)));
    }
}

TEST(Query, ExtractionIsOrderIndependent) {
    auto q = fixtures::job18a_document().pattern;
    auto r = q;
    std::reverse(r.vertices.begin(), r.vertices.end());
    std::reverse(r.edges.begin(), r.edges.end());
    std::reverse(r.props.begin(), r.props.end());
    EXPECT_EQ(extract_constraints(q), extract_constraints(r));
}

TEST(Query, Job18aSourceStars) {
    auto q = fixtures::job18a_document().pattern;
    auto stars = enumerate_subpatterns(q, {PatternClass::SourceStar, 2});
    auto it = std::find_if(stars.begin(), stars.end(), [](const Subpattern& s) {
        return s.center == "id0" && s.edges == std::vector<std::string>{"id1", "id3"};
    });
    ASSERT_NE(it, stars.end());
    EXPECT_TRUE(it->constraints.count(Constraint::has_label("id1", "budget")));
    EXPECT_TRUE(it->constraints.count(Constraint::has_label("id3", "votes")));
    EXPECT_EQ(ids_of(it->constraints), (std::set<std::string>{"id0", "id1", "id2", "id3", "id4"}));
}

TEST(Query, SubpatternCounts) {
    auto q = fixtures::g4_query();
    EXPECT_TRUE(enumerate_subpatterns(q, {PatternClass::Chain, 2}).empty());
    EXPECT_EQ(enumerate_subpatterns(q, {PatternClass::Edge, 1}).size(), 1u);
    auto job = fixtures::job18a_document().pattern;
    EXPECT_EQ(enumerate_subpatterns(job, {PatternClass::Edge, 1}).size(), 4u);
    // id6 -> id0 -> id2, id6 -> id0 -> id4.
    EXPECT_EQ(enumerate_subpatterns(job, {PatternClass::Chain, 2}).size(), 2u);
    EXPECT_EQ(enumerate_subpatterns(job, {PatternClass::SourceStar, 2}).size(), 2u);
    EXPECT_EQ(enumerate_subpatterns(job, {PatternClass::SourceStar, 3}).size(), 0u);
    EXPECT_EQ(enumerate_subpatterns(job, {PatternClass::Star, 3}).size(), 1u);
    auto per_id = enumerate_subpatterns(job, {PatternClass::PerId, 1});
    auto id8 = std::find_if(per_id.begin(), per_id.end(), [](const Subpattern& s) { return s.center == "id8"; });
    ASSERT_NE(id8, per_id.end());
    EXPECT_EQ(id8->constraints.size(), 5u);  // label + 2 hasKey + 2 propValue
}

TEST(Query, DocumentJsonRoundTrip) {
    auto doc = fixtures::job18a_document();
    auto again = parse_query_document(query_to_json(doc));
    EXPECT_EQ(extract_constraints(again.pattern), extract_constraints(doc.pattern));
    EXPECT_EQ(again.id, doc.id);
}
