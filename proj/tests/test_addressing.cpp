#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>
#include <vector>

#include "koch/addressing.hpp"

using namespace koch;

TEST_CASE("key lookup") {
    CHECK(key_of("5") == '1');
    CHECK(key_of("54") == '1');
    CHECK(key_of("1") == '1');
    CHECK(key_of("3") == '3');
    CHECK(key_of("30") == '3');
    CHECK(key_of("51") == '1');
    CHECK(key_of("513") == '3');
    CHECK(key_of("5132") == '3');
    CHECK_THROWS_AS(key_of(""), domain_error);
    CHECK_THROWS_AS(key_of("0"), domain_error);
}

TEST_CASE("child digits") {
    auto base = child_digits("5");
    CHECK(base.start_third == '4');
    CHECK(base.bump_first == '1');
    CHECK(base.bump_second == '3');
    CHECK(base.end_third == '2');
    CHECK(child_words("5") == std::array<AddressWord, 4>{"54", "51", "53", "52"});

    auto k1 = child_digits("51");
    CHECK(k1.start_third == '4');
    CHECK(k1.end_third == '2');
    CHECK(child_words("51") == std::array<AddressWord, 4>{"514", "511", "513", "512"});

    auto k3 = child_digits("13");
    CHECK(k3.start_third == '2');
    CHECK(k3.end_third == '0');
    CHECK(child_words("13") == std::array<AddressWord, 4>{"132", "131", "133", "130"});

    CHECK_THROWS_AS(child_digits("6"), domain_error);
    CHECK_THROWS_AS(child_digits("55"), domain_error);
    CHECK_THROWS_AS(child_digits("50"), domain_error);  // key-1 thirds are 4 and 2
}

TEST_CASE("truncate") {
    CHECK(koch::truncate("513", 2) == "51");
    CHECK(koch::truncate("51", 1) == "5");
    CHECK(koch::truncate("51242", 5) == "51242");
    CHECK(koch::truncate("51242", 0) == "");
    CHECK_THROWS_AS(koch::truncate("51", 3), domain_error);
}

TEST_CASE("generated words form a valid injective family") {
    std::vector<AddressWord> level = {"5", "1", "3"};
    for (unsigned n = 0; n <= 6; ++n) {
        CHECK(level.size() == 3u * (1u << (2 * n)));
        std::set<AddressWord> seen(level.begin(), level.end());
        CHECK(seen.size() == level.size());
        for (const auto& w : level) {
            CHECK(is_valid_side_address(w));
            CHECK(w.size() == n + 1);
            if (w.size() > 1) {
                CHECK(w.back() != '5');
                CHECK(w.find('5', 1) == AddressWord::npos);
            }
        }
        std::vector<AddressWord> next;
        for (const auto& w : level)
            for (const auto& c : child_words(w)) next.push_back(c);
        level = std::move(next);
    }
}

TEST_CASE("straighten examples") {
    CHECK(straighten("13123232113133100324") == "13123212313131344120");
    CHECK(straighten("13") == "13");
    CHECK(straighten("11") == "13");
    CHECK(straighten("") == "");
    CHECK(straighten("024") == "024");
    CHECK(straighten("5202") == "5202");
    CHECK(straighten("3131") == "3131");
    CHECK(straighten("33") == "31");
    CHECK(straighten("1041") == "1043");  // unchanged 1, untouched gap, forced 3
    CHECK(straighten("1140") == "1304");  // changed 3 swaps the gap that follows
}

TEST_CASE("straighten properties") {
    std::mt19937_64 rng(424242);
    std::uniform_int_distribution<int> len(0, 40);
    std::uniform_int_distribution<int> sym(0, 5);
    for (int i = 0; i < 10000; ++i) {
        std::string w;
        int n = len(rng);
        for (int j = 0; j < n; ++j) w.push_back(static_cast<char>('0' + sym(rng)));
        std::string s = straighten(w);
        CHECK(s.size() == w.size());
        CHECK(straighten(s) == s);
        bool before_first = true;
        char expect = 0;
        for (std::size_t j = 0; j < w.size(); ++j) {
            if (w[j] == '2' || w[j] == '5') CHECK(s[j] == w[j]);
            if (is_bump_symbol(w[j])) {
                if (before_first) {
                    CHECK(s[j] == w[j]);
                    expect = w[j];
                    before_first = false;
                } else {
                    expect = expect == '1' ? '3' : '1';
                    CHECK(s[j] == expect);
                }
            } else if (before_first) {
                CHECK(s[j] == w[j]);
            }
        }
    }
}
