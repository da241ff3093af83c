#ifndef FAMREC_TESTS_SUPPORT_HPP_
#define FAMREC_TESTS_SUPPORT_HPP_

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include <unistd.h>

namespace support {

/// Scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("famrec-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Writes the five input files; each argument is the body below the header.
inline void write_inputs(const std::filesystem::path& dir, const std::string& profiles,
                         const std::string& transactions, const std::string& visits = "",
                         const std::string& participation = "", const std::string& families = "") {
    write_file(dir / "profiles.csv",
               "member_id,join_days,sex,age,phone_present,email_present,neighborhood,"
               "register_source,income\n" + profiles);
    write_file(dir / "transactions.csv",
               "member_id,timestamp,product_brand,product_type,main_category,quantity\n" +
                   transactions);
    write_file(dir / "visits.csv", "member_id,check_in,check_out\n" + visits);
    write_file(dir / "participation.csv", "member_id,activity_id,timestamp\n" + participation);
    write_file(dir / "families.csv", "family_id,member_ids\n" + families);
}

} // namespace support

#endif // FAMREC_TESTS_SUPPORT_HPP_
