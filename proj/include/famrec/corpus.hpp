#ifndef FAMREC_CORPUS_HPP_
#define FAMREC_CORPUS_HPP_

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "famrec/error.hpp"
#include "famrec/time.hpp"

namespace famrec {

/// Signal axes. The first four are interaction axes; profile and hybrid
/// only tag similarity matrices.
enum class Axis { brand, type, category, activity, profile, hybrid };

inline constexpr Axis kProductAxes[] = {Axis::brand, Axis::type, Axis::category};
inline constexpr Axis kBlendAxes[] = {Axis::brand, Axis::type, Axis::category, Axis::activity,
                                      Axis::profile};

inline std::string_view axis_name(Axis axis) {
    switch (axis) {
    case Axis::brand: return "brand";
    case Axis::type: return "type";
    case Axis::category: return "category";
    case Axis::activity: return "activity";
    case Axis::profile: return "profile";
    case Axis::hybrid: return "hybrid";
    }
    return "?";
}

inline Axis parse_axis(std::string_view name) {
    for (Axis a : {Axis::brand, Axis::type, Axis::category, Axis::activity, Axis::profile,
                   Axis::hybrid})
        if (axis_name(a) == name)
            return a;
    throw UsageError("unknown axis '" + std::string(name) + "'");
}

enum class Sex { female, male, unknown };

inline std::string_view sex_name(Sex s) {
    switch (s) {
    case Sex::female: return "female";
    case Sex::male: return "male";
    case Sex::unknown: return "unknown";
    }
    return "?";
}

struct ClientProfile {
    std::string member_id;
    long join_days = 0;
    std::optional<Sex> sex;
    std::optional<double> age;
    bool phone_present = false;
    bool email_present = false;
    std::string neighborhood;     // empty = missing
    std::string register_source;  // empty = missing
    std::optional<double> income;

    bool operator==(const ClientProfile&) const = default;
};

struct Transaction {
    std::string member_id;
    Instant timestamp;
    std::string product_brand;
    std::string product_type;
    std::string main_category;
    long quantity = 1;

    bool operator==(const Transaction&) const = default;

    const std::string& item(Axis axis) const {
        switch (axis) {
        case Axis::brand: return product_brand;
        case Axis::type: return product_type;
        case Axis::category: return main_category;
        default: throw UsageError("transactions carry no '" + std::string(axis_name(axis)) + "' item");
        }
    }
};

struct Visit {
    std::string member_id;
    Instant check_in;
    Instant check_out;

    bool operator==(const Visit&) const = default;
};

struct Participation {
    std::string member_id;
    std::string activity_id;
    Instant timestamp;

    bool operator==(const Participation&) const = default;
};

struct FamilyGroup {
    std::string family_id;
    std::vector<std::string> member_ids;

    bool operator==(const FamilyGroup&) const = default;
};

struct Corpus {
    std::vector<ClientProfile> profiles;
    std::vector<Transaction> transactions;
    std::vector<Visit> visits;
    std::vector<Participation> participations;
    std::vector<FamilyGroup> families;

    bool operator==(const Corpus&) const = default;
};

/// (actor, item, quantity) implicit-feedback atom.
struct InteractionTriple {
    std::string actor_id;
    std::string item_id;
    long quantity = 0;

    bool operator==(const InteractionTriple&) const = default;
};

/// A triple collection drawn from a single axis, sorted by (actor, item)
/// with unique keys.
struct Triples {
    Axis axis = Axis::brand;
    std::vector<InteractionTriple> rows;

    bool operator==(const Triples&) const = default;
};

// ---------------------------------------------------------------------------
// Parsing and serialization

struct CorpusPaths {
    std::filesystem::path profiles;
    std::filesystem::path transactions;
    std::filesystem::path visits;
    std::filesystem::path participation;
    std::filesystem::path families;

    static CorpusPaths in_directory(const std::filesystem::path& dir) {
        return {dir / "profiles.csv", dir / "transactions.csv", dir / "visits.csv",
                dir / "participation.csv", dir / "families.csv"};
    }
};

inline constexpr std::string_view kProfileHeader[] = {
    "member_id", "join_days", "sex", "age", "phone_present", "email_present", "neighborhood",
    "register_source", "income"};
inline constexpr std::string_view kTransactionHeader[] = {
    "member_id", "timestamp", "product_brand", "product_type", "main_category", "quantity"};
inline constexpr std::string_view kVisitHeader[] = {"member_id", "check_in", "check_out"};
inline constexpr std::string_view kParticipationHeader[] = {"member_id", "activity_id",
                                                            "timestamp"};
inline constexpr std::string_view kFamilyHeader[] = {"family_id", "member_ids"};
inline constexpr char kMemberListDelimiter = '|';

/// A row that failed validation and was left out of the parsed corpus.
struct RejectedRow {
    std::string dataset;
    std::size_t line = 0;
    std::string reason;
};

struct ParseResult {
    Corpus corpus;
    std::vector<RejectedRow> rejected;
};

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line, char delimiter) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(delimiter, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

inline std::optional<long> to_long(std::string_view s) {
    long v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || s.empty())
        return std::nullopt;
    return v;
}

inline std::optional<double> to_double(std::string_view s) {
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || s.empty())
        return std::nullopt;
    return v;
}

/// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

struct RowError {
    std::string reason;
};

/// Reads a delimited file, checks its header, and hands each data row to
/// `on_row(fields, line_number)`. on_row throws RowError to reject a row.
template <class OnRow>
void read_table(const std::filesystem::path& path, std::string_view dataset,
                std::span<const std::string_view> header, char delimiter,
                std::vector<RejectedRow>& rejected, OnRow&& on_row) {
    std::ifstream in(path);
    if (!in)
        throw DataError("missing " + std::string(dataset) + " file: " + path.string());
    std::string line;
    std::size_t line_no = 0;
    auto strip_cr = [](std::string& s) {
        if (!s.empty() && s.back() == '\r')
            s.pop_back();
    };
    if (!std::getline(in, line))
        throw DataError(std::string(dataset) + " file is empty: " + path.string());
    ++line_no;
    strip_cr(line);
    const auto got = split_fields(line, delimiter);
    if (!std::equal(got.begin(), got.end(), header.begin(), header.end()))
        throw DataError(std::string(dataset) + " header mismatch in " + path.string() +
                        ": got '" + line + "'");
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty())
            continue;
        const auto fields = split_fields(line, delimiter);
        try {
            if (fields.size() != header.size())
                throw RowError{"expected " + std::to_string(header.size()) + " fields, got " +
                               std::to_string(fields.size())};
            on_row(fields, line_no);
        } catch (const RowError& e) {
            rejected.push_back({std::string(dataset), line_no, e.reason});
        }
    }
}

inline Instant row_instant(std::string_view s) {
    try {
        return parse_instant(s);
    } catch (const DataError& e) {
        throw RowError{e.what()};
    }
}

inline std::optional<double> row_optional_nonneg(std::string_view s, std::string_view what) {
    if (s.empty())
        return std::nullopt;
    auto v = to_double(s);
    if (!v || *v < 0)
        throw RowError{std::string(what) + " must be a nonnegative number, got '" +
                       std::string(s) + "'"};
    return v;
}

inline bool row_flag(std::string_view s, std::string_view what) {
    if (s == "1")
        return true;
    if (s == "0")
        return false;
    throw RowError{std::string(what) + " must be 0 or 1, got '" + std::string(s) + "'"};
}

} // namespace detail

/// Parses all five datasets. Malformed rows are skipped and listed in
/// ParseResult::rejected with their line numbers; missing files, header
/// mismatches and duplicate keys throw DataError.
inline ParseResult parse_corpus(const CorpusPaths& paths, char delimiter = ',') {
    using detail::RowError;
    ParseResult result;
    Corpus& c = result.corpus;
    std::unordered_set<std::string> members;

    detail::read_table(
        paths.profiles, "profiles", kProfileHeader, delimiter, result.rejected,
        [&](const std::vector<std::string_view>& f, std::size_t line) {
            ClientProfile p;
            p.member_id = f[0];
            if (p.member_id.empty())
                throw RowError{"empty member_id"};
            auto join = detail::to_long(f[1]);
            if (!join || *join < 0)
                throw RowError{"join_days must be a nonnegative integer"};
            p.join_days = *join;
            if (f[2] == "female")
                p.sex = Sex::female;
            else if (f[2] == "male")
                p.sex = Sex::male;
            else if (f[2] == "unknown")
                p.sex = Sex::unknown;
            else if (!f[2].empty())
                throw RowError{"unrecognized sex '" + std::string(f[2]) + "'"};
            p.age = detail::row_optional_nonneg(f[3], "age");
            p.phone_present = detail::row_flag(f[4], "phone_present");
            p.email_present = detail::row_flag(f[5], "email_present");
            p.neighborhood = f[6];
            p.register_source = f[7];
            p.income = detail::row_optional_nonneg(f[8], "income");
            if (!members.insert(p.member_id).second)
                throw DataError("duplicate member_id '" + p.member_id + "' at profiles line " +
                                std::to_string(line));
            c.profiles.push_back(std::move(p));
        });

    auto known_member = [&](std::string_view id) {
        if (!members.count(std::string(id)))
            throw RowError{"unknown member '" + std::string(id) + "'"};
    };

    detail::read_table(paths.transactions, "transactions", kTransactionHeader, delimiter,
                       result.rejected,
                       [&](const std::vector<std::string_view>& f, std::size_t) {
                           Transaction t;
                           t.member_id = f[0];
                           if (!t.member_id.empty())
                               known_member(f[0]);
                           t.timestamp = detail::row_instant(f[1]);
                           t.product_brand = f[2];
                           t.product_type = f[3];
                           t.main_category = f[4];
                           auto q = detail::to_long(f[5]);
                           if (!q || *q < 1)
                               throw RowError{"quantity must be a positive integer, got '" +
                                              std::string(f[5]) + "'"};
                           t.quantity = *q;
                           c.transactions.push_back(std::move(t));
                       });

    detail::read_table(paths.visits, "visits", kVisitHeader, delimiter, result.rejected,
                       [&](const std::vector<std::string_view>& f, std::size_t) {
                           known_member(f[0]);
                           Visit v{std::string(f[0]), detail::row_instant(f[1]),
                                   detail::row_instant(f[2])};
                           if (v.check_out < v.check_in)
                               throw RowError{"check_out precedes check_in"};
                           c.visits.push_back(std::move(v));
                       });

    detail::read_table(paths.participation, "participation", kParticipationHeader, delimiter,
                       result.rejected,
                       [&](const std::vector<std::string_view>& f, std::size_t) {
                           known_member(f[0]);
                           if (f[1].empty())
                               throw RowError{"empty activity_id"};
                           c.participations.push_back(
                               {std::string(f[0]), std::string(f[1]), detail::row_instant(f[2])});
                       });

    std::unordered_map<std::string, std::string> family_of;
    std::unordered_set<std::string> family_ids;
    detail::read_table(
        paths.families, "families", kFamilyHeader, delimiter, result.rejected,
        [&](const std::vector<std::string_view>& f, std::size_t line) {
            FamilyGroup g;
            g.family_id = f[0];
            if (g.family_id.empty())
                throw RowError{"empty family_id"};
            if (f[1].empty())
                throw RowError{"family has no members"};
            std::unordered_set<std::string_view> seen;
            for (auto m : detail::split_fields(f[1], kMemberListDelimiter)) {
                if (m.empty())
                    throw RowError{"empty member id in member list"};
                known_member(m);
                if (!seen.insert(m).second)
                    throw RowError{"member '" + std::string(m) + "' listed twice"};
                g.member_ids.emplace_back(m);
            }
            if (!family_ids.insert(g.family_id).second)
                throw DataError("duplicate family_id '" + g.family_id + "' at families line " +
                                std::to_string(line));
            for (const auto& m : g.member_ids) {
                auto [it, fresh] = family_of.emplace(m, g.family_id);
                if (!fresh)
                    throw DataError("member '" + m + "' belongs to families '" + it->second +
                                    "' and '" + g.family_id + "' (families line " +
                                    std::to_string(line) + ")");
            }
            c.families.push_back(std::move(g));
        });

    return result;
}

/// Writes the corpus in the format parse_corpus reads.
inline void write_corpus(const Corpus& c, const CorpusPaths& paths, char delimiter = ',') {
    auto open = [](const std::filesystem::path& p) {
        if (p.has_parent_path())
            std::filesystem::create_directories(p.parent_path());
        std::ofstream out(p, std::ios::binary);
        if (!out)
            throw DataError("cannot write " + p.string());
        return out;
    };
    auto header = [&](std::ostream& out, std::span<const std::string_view> cols) {
        for (std::size_t i = 0; i < cols.size(); ++i)
            out << (i ? std::string(1, delimiter) : "") << cols[i];
        out << '\n';
    };
    const char d = delimiter;
    auto opt = [](const std::optional<double>& v) {
        return v ? detail::format_double(*v) : std::string();
    };
    {
        auto out = open(paths.profiles);
        header(out, kProfileHeader);
        for (const auto& p : c.profiles)
            out << p.member_id << d << p.join_days << d << (p.sex ? sex_name(*p.sex) : "") << d
                << opt(p.age) << d << (p.phone_present ? 1 : 0) << d << (p.email_present ? 1 : 0)
                << d << p.neighborhood << d << p.register_source << d << opt(p.income) << '\n';
    }
    {
        auto out = open(paths.transactions);
        header(out, kTransactionHeader);
        for (const auto& t : c.transactions)
            out << t.member_id << d << format_instant(t.timestamp) << d << t.product_brand << d
                << t.product_type << d << t.main_category << d << t.quantity << '\n';
    }
    {
        auto out = open(paths.visits);
        header(out, kVisitHeader);
        for (const auto& v : c.visits)
            out << v.member_id << d << format_instant(v.check_in) << d
                << format_instant(v.check_out) << '\n';
    }
    {
        auto out = open(paths.participation);
        header(out, kParticipationHeader);
        for (const auto& p : c.participations)
            out << p.member_id << d << p.activity_id << d << format_instant(p.timestamp) << '\n';
    }
    {
        auto out = open(paths.families);
        header(out, kFamilyHeader);
        for (const auto& g : c.families) {
            out << g.family_id << d;
            for (std::size_t i = 0; i < g.member_ids.size(); ++i)
                out << (i ? std::string(1, kMemberListDelimiter) : "") << g.member_ids[i];
            out << '\n';
        }
    }
}

// ---------------------------------------------------------------------------
// Cleaning

inline constexpr std::string_view kUnknownLevel = "unknown";

struct CleanReport {
    std::size_t ages_imputed = 0;
    std::size_t incomes_imputed = 0;
    std::size_t categoricals_set_unknown = 0;
    std::size_t transactions_deleted = 0;
};

struct CleanResult {
    Corpus corpus;
    CleanReport report;
};

/// Imputes numeric gaps with the column mean, maps missing categoricals to
/// "unknown", and drops transactions without a member. Idempotent.
inline CleanResult clean_missing(Corpus corpus) {
    CleanReport report;

    auto impute = [&](std::optional<double> ClientProfile::*field, std::string_view column,
                      std::size_t& counter) {
        double sum = 0;
        std::size_t present = 0;
        std::size_t missing = 0;
        for (const auto& p : corpus.profiles) {
            if (p.*field) {
                sum += *(p.*field);
                ++present;
            } else {
                ++missing;
            }
        }
        if (missing == 0)
            return;
        if (present == 0)
            throw DataError("column '" + std::string(column) +
                            "' has no values to compute a mean from");
        const double mean = sum / static_cast<double>(present);
        for (auto& p : corpus.profiles)
            if (!(p.*field)) {
                p.*field = mean;
                ++counter;
            }
    };
    impute(&ClientProfile::age, "age", report.ages_imputed);
    impute(&ClientProfile::income, "income", report.incomes_imputed);

    auto unknown_if_empty = [&](std::string& s) {
        if (s.empty()) {
            s = kUnknownLevel;
            ++report.categoricals_set_unknown;
        }
    };
    for (auto& p : corpus.profiles) {
        if (!p.sex) {
            p.sex = Sex::unknown;
            ++report.categoricals_set_unknown;
        }
        unknown_if_empty(p.neighborhood);
        unknown_if_empty(p.register_source);
    }

    const auto before = corpus.transactions.size();
    std::erase_if(corpus.transactions, [](const Transaction& t) { return t.member_id.empty(); });
    report.transactions_deleted = before - corpus.transactions.size();
    for (auto& t : corpus.transactions) {
        unknown_if_empty(t.product_brand);
        unknown_if_empty(t.product_type);
        unknown_if_empty(t.main_category);
    }
    return {std::move(corpus), report};
}

// ---------------------------------------------------------------------------
// Triples

namespace detail {

inline Triples triples_from_counts(Axis axis,
                                   const std::map<std::pair<std::string, std::string>, long>& acc) {
    Triples out{axis, {}};
    out.rows.reserve(acc.size());
    for (const auto& [key, qty] : acc)
        out.rows.push_back({key.first, key.second, qty});
    return out;
}

} // namespace detail

/// One triple per (member, item) on a product axis, quantities summed.
inline Triples extract_triples(std::span<const Transaction> transactions, Axis axis) {
    std::map<std::pair<std::string, std::string>, long> acc;
    for (const auto& t : transactions)
        acc[{t.member_id, t.item(axis)}] += t.quantity;
    return detail::triples_from_counts(axis, acc);
}

/// Activity triples: quantity is the participation count.
inline Triples extract_triples(std::span<const Participation> participations) {
    std::map<std::pair<std::string, std::string>, long> acc;
    for (const auto& p : participations)
        acc[{p.member_id, p.activity_id}] += 1;
    return detail::triples_from_counts(Axis::activity, acc);
}

inline Triples extract_triples(const Corpus& corpus, Axis axis) {
    if (axis == Axis::activity)
        return extract_triples(std::span<const Participation>(corpus.participations));
    return extract_triples(std::span<const Transaction>(corpus.transactions), axis);
}

// ---------------------------------------------------------------------------
// Profile encoding

/// One attribute's slice of an encoded profile vector.
struct LayoutBlock {
    std::string attribute;
    std::size_t begin = 0;
    std::size_t end = 0;
    std::vector<std::string> levels;  // empty for numeric and flag attributes

    bool operator==(const LayoutBlock&) const = default;
};

struct ProfileLayout {
    std::vector<LayoutBlock> blocks;

    std::size_t extent() const { return blocks.empty() ? 0 : blocks.back().end; }
    const LayoutBlock& block(std::string_view attribute) const {
        for (const auto& b : blocks)
            if (b.attribute == attribute)
                return b;
        throw UsageError("no layout block '" + std::string(attribute) + "'");
    }
    bool operator==(const ProfileLayout&) const = default;
};

struct ProfileVector {
    std::string actor_id;
    std::vector<double> values;
    std::shared_ptr<const ProfileLayout> layout;
};

/// One-hot encodes categoricals (levels in first-occurrence order),
/// min-max scales numerics (constant columns become 0), and encodes
/// phone/email presence as 0/1. Requires cleaned profiles.
inline std::vector<ProfileVector> encode_profiles(std::span<const ClientProfile> profiles) {
    for (const auto& p : profiles)
        if (!p.age || !p.income || !p.sex || p.neighborhood.empty() || p.register_source.empty())
            throw DataError("profile '" + p.member_id + "' has missing values; clean first");

    auto levels_of = [&](auto get) {
        std::vector<std::string> levels;
        for (const auto& p : profiles) {
            std::string v(get(p));
            if (std::find(levels.begin(), levels.end(), v) == levels.end())
                levels.push_back(std::move(v));
        }
        return levels;
    };
    auto sex_of = [](const ClientProfile& p) { return sex_name(*p.sex); };
    auto hood_of = [](const ClientProfile& p) -> std::string_view { return p.neighborhood; };
    auto source_of = [](const ClientProfile& p) -> std::string_view { return p.register_source; };

    struct Range {
        double lo = 0, hi = 0;
        double scale(double x) const { return hi > lo ? (x - lo) / (hi - lo) : 0.0; }
    };
    auto range_of = [&](auto get) {
        Range r;
        bool first = true;
        for (const auto& p : profiles) {
            const double x = get(p);
            if (first || x < r.lo) r.lo = x;
            if (first || x > r.hi) r.hi = x;
            first = false;
        }
        return r;
    };
    const Range join = range_of([](const ClientProfile& p) { return double(p.join_days); });
    const Range age = range_of([](const ClientProfile& p) { return *p.age; });
    const Range income = range_of([](const ClientProfile& p) { return *p.income; });

    auto layout = std::make_shared<ProfileLayout>();
    std::size_t cursor = 0;
    auto add = [&](std::string name, std::vector<std::string> levels) {
        const std::size_t width = levels.empty() ? 1 : levels.size();
        layout->blocks.push_back({std::move(name), cursor, cursor + width, std::move(levels)});
        cursor += width;
    };
    add("join_days", {});
    add("sex", levels_of(sex_of));
    add("age", {});
    add("phone_present", {});
    add("email_present", {});
    add("neighborhood", levels_of(hood_of));
    add("register_source", levels_of(source_of));
    add("income", {});

    auto one_hot = [](std::vector<double>& v, const LayoutBlock& b, std::string_view value) {
        const auto it = std::find(b.levels.begin(), b.levels.end(), value);
        v[b.begin + static_cast<std::size_t>(it - b.levels.begin())] = 1.0;
    };

    const auto& B = layout->blocks;
    std::vector<ProfileVector> out;
    out.reserve(profiles.size());
    for (const auto& p : profiles) {
        std::vector<double> v(cursor, 0.0);
        v[B[0].begin] = join.scale(double(p.join_days));
        one_hot(v, B[1], sex_of(p));
        v[B[2].begin] = age.scale(*p.age);
        v[B[3].begin] = p.phone_present ? 1.0 : 0.0;
        v[B[4].begin] = p.email_present ? 1.0 : 0.0;
        one_hot(v, B[5], p.neighborhood);
        one_hot(v, B[6], p.register_source);
        v[B[7].begin] = income.scale(*p.income);
        out.push_back({p.member_id, std::move(v), layout});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Temporal split

struct SplitDataset {
    std::vector<Transaction> train;
    std::vector<Transaction> test;
    Instant split_point;

    double train_fraction() const {
        return double(train.size()) / double(train.size() + test.size());
    }
    double test_fraction() const { return 1.0 - train_fraction(); }
};

/// Transactions before split_point go to train, the rest (including any
/// exactly at split_point) to test. Throws DataError if either side is empty.
inline SplitDataset temporal_split(std::span<const Transaction> transactions, Instant split_point) {
    SplitDataset out;
    out.split_point = split_point;
    for (const auto& t : transactions)
        (t.timestamp < split_point ? out.train : out.test).push_back(t);
    if (out.train.empty())
        throw DataError("temporal split at " + format_instant(split_point) + " leaves no training data");
    if (out.test.empty())
        throw DataError("temporal split at " + format_instant(split_point) + " leaves no test data");
    return out;
}

/// Earliest timestamp t such that the share of transactions at or after t
/// does not exceed test_fraction.
inline Instant split_point_for_fraction(std::span<const Transaction> transactions,
                                        double test_fraction) {
    if (transactions.empty())
        throw DataError("cannot resolve a split point without transactions");
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw UsageError("test fraction must lie in (0, 1)");
    std::vector<Instant> ts;
    ts.reserve(transactions.size());
    for (const auto& t : transactions)
        ts.push_back(t.timestamp);
    std::sort(ts.begin(), ts.end());
    const double budget = test_fraction * double(ts.size());
    // Walk distinct timestamps from the latest backwards while the suffix fits.
    std::size_t i = ts.size();
    while (i > 0) {
        std::size_t j = i - 1;
        while (j > 0 && ts[j - 1] == ts[i - 1])
            --j;
        if (double(ts.size() - j) > budget)
            break;
        i = j;
    }
    if (i == ts.size())
        return ts.back() + std::chrono::seconds{1};
    return ts[i];
}

} // namespace famrec

#endif // FAMREC_CORPUS_HPP_
