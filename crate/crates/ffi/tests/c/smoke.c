#include <math.h>
#include <stdio.h>
#include "nodal_lab.h"

#define CHECK(expr)                                                   \
    do {                                                              \
        if (!(expr)) {                                                \
            fprintf(stderr, "failed: %s (line %d)\n", #expr, __LINE__); \
            return 1;                                                 \
        }                                                             \
    } while (0)

int main(void) {
    /* cos x cos y: nodal set is a cross of length 2 pi in [0, pi]^2. */
    double one = 1.0;
    NlPoly *p = NULL;
    CHECK(nl_poly_new(1, &one, &p) == NL_STATUS_OK);
    CHECK(nl_poly_degree(p) == 1);

    NlNodalSet *s = NULL;
    CHECK(nl_nodal_extract(p, &s) == NL_STATUS_OK);
    double len = 0.0;
    CHECK(nl_nodal_total_length(s, &len) == NL_STATUS_OK);
    CHECK(fabs(len - 2.0 * M_PI) < 1e-3);

    size_t need = 0;
    CHECK(nl_nodal_segments(s, NULL, 0, &need) == NL_STATUS_INVALID_ARGUMENT);
    CHECK(need == 4 * nl_nodal_segment_count(s));
    nl_nodal_free(s);
    nl_poly_free(p);

    double e = 0.0;
    CHECK(nl_kacrice_expected_length(20, 0.0, M_PI, 0.0, M_PI, 1e-8, &e, NULL) == NL_STATUS_OK);
    CHECK(fabs(e - 59.029697) < 1e-5);

    CHECK(nl_poly_sample(7, 3, 0, &p) == NL_STATUS_INVALID_ARGUMENT);
    char msg[128];
    CHECK(nl_last_error(msg, sizeof msg) > 0);
    printf("ok %s: %s\n", nl_version(), msg);
    return 0;
}
