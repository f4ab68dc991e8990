#include "pntlab/pntlab.h"

#include <cstring>
#include <new>
#include <string>

#include "pntlab/arith_sieve.hpp"
#include "pntlab/error.hpp"
#include "pntlab/good_primes.hpp"
#include "pntlab/pnt_chain.hpp"
#include "pntlab/report.hpp"
#include "pntlab/selberg_scales.hpp"

struct pntlab_table {
  pntlab::ArithTable table;
};

namespace {

thread_local std::string last_error;

pntlab_status fail(pntlab_status s, const std::string& msg) {
  last_error = msg;
  return s;
}

template <class F>
pntlab_status guarded(F&& f) {
  try {
    last_error.clear();
    f();
    return PNTLAB_OK;
  } catch (const pntlab::Error& e) {
    return fail(static_cast<pntlab_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(PNTLAB_ERR_RESOURCE, "out of memory");
  } catch (const std::exception& e) {
    return fail(PNTLAB_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(PNTLAB_ERR_INTERNAL, "unknown exception");
  }
}

void need(const void* p, const char* what) {
  if (p == nullptr) throw pntlab::InvalidArgument(std::string(what) + " is null");
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* pntlab_version(void) { return pntlab::kToolVersion; }

const char* pntlab_last_error(void) { return last_error.c_str(); }

pntlab_status pntlab_table_build(const char* kind, uint64_t limit, pntlab_table** out) {
  return guarded([&] {
    need(kind, "kind");
    need(out, "out");
    *out = nullptr;
    const auto k = pntlab::parse_table_kind(kind);
    if (k == pntlab::TableKind::custom)
      throw pntlab::InvalidArgument("custom tables cannot be built");
    *out = new pntlab_table{pntlab::build_table(k, limit)};
  });
}

pntlab_status pntlab_table_load(const char* path, pntlab_table** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = nullptr;
    *out = new pntlab_table{pntlab::load_table(path)};
  });
}

pntlab_status pntlab_table_save(const pntlab_table* table, const char* path) {
  return guarded([&] {
    need(table, "table");
    need(path, "path");
    pntlab::save_table(table->table, path);
  });
}

void pntlab_table_free(pntlab_table* table) { delete table; }

pntlab_status pntlab_table_limit(const pntlab_table* table, uint64_t* out) {
  return guarded([&] {
    need(table, "table");
    need(out, "out");
    *out = table->table.limit();
  });
}

pntlab_status pntlab_table_kind(const pntlab_table* table, char* buf, size_t len) {
  return guarded([&] {
    need(table, "table");
    need(buf, "buf");
    const auto name = pntlab::to_string(table->table.kind());
    if (len < name.size() + 1)
      throw pntlab::InvalidArgument("buffer too small for kind name");
    std::memcpy(buf, name.data(), name.size());
    buf[name.size()] = '\0';
  });
}

pntlab_status pntlab_table_value(const pntlab_table* table, uint64_t n, double* out) {
  return guarded([&] {
    need(table, "table");
    need(out, "out");
    *out = table->table.at(n);
  });
}

pntlab_status pntlab_table_checksum(const pntlab_table* table, uint64_t* out) {
  return guarded([&] {
    need(table, "table");
    need(out, "out");
    *out = pntlab::table_checksum(table->table);
  });
}

pntlab_status pntlab_table_convolve(const pntlab_table* f, const pntlab_table* g,
                                    pntlab_table** out) {
  return guarded([&] {
    need(f, "f");
    need(g, "g");
    need(out, "out");
    *out = nullptr;
    *out = new pntlab_table{pntlab::dirichlet_convolve(f->table, g->table)};
  });
}

pntlab_status pntlab_mertens(const pntlab_table* mu, uint64_t x, int64_t* out) {
  return guarded([&] {
    need(mu, "mu");
    need(out, "out");
    if (!mu->table.is_mobius()) throw pntlab::InvalidArgument("table is not mobius");
    *out = pntlab::prefix_sums(mu->table).mertens_at(x);
  });
}

pntlab_status pntlab_selberg_ratio(const pntlab_table* lambda2, uint64_t n, double* out) {
  return guarded([&] {
    need(lambda2, "lambda2");
    need(out, "out");
    *out = pntlab::selberg_ratio(lambda2->table, n);
  });
}

pntlab_status pntlab_badness(const pntlab_table* mu, uint64_t p, uint64_t n,
                             double epsilon, double* badness, int* is_good) {
  return guarded([&] {
    need(mu, "mu");
    need(badness, "badness");
    const auto r = pntlab::badness_score(mu->table, p, n, epsilon);
    *badness = r.badness;
    if (is_good) *is_good = r.is_good ? 1 : 0;
  });
}

pntlab_status pntlab_log_avg_discrepancy(const pntlab_table* mu, uint64_t n, double* out) {
  return guarded([&] {
    need(mu, "mu");
    need(out, "out");
    *out = pntlab::log_avg_discrepancy(mu->table, n);
  });
}

pntlab_status pntlab_run(int argc, const char* const* argv, int* exit_code,
                         char** output, char** diagnostics) {
  return guarded([&] {
    need(exit_code, "exit_code");
    if (argc < 0 || (argc > 0 && argv == nullptr))
      throw pntlab::InvalidArgument("bad argv");
    std::vector<std::string> args;
    for (int i = 0; i < argc; ++i) {
      need(argv[i], "argv entry");
      args.emplace_back(argv[i]);
    }
    const auto r = pntlab::run(args);
    *exit_code = r.exit_code;
    if (output) *output = dup(r.output);
    if (diagnostics) *diagnostics = dup(r.diagnostics);
  });
}

void pntlab_string_free(char* s) { std::free(s); }

}  // extern "C"
