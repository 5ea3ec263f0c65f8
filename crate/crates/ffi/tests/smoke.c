#include <math.h>
#include <stdio.h>
#include "homokernel.h"

#define CHECK(cond) do { if (!(cond)) { fprintf(stderr, "failed: %s (line %d)\n", #cond, __LINE__); return 1; } } while (0)

int main(void) {
    HkDomain *d = NULL;
    CHECK(hk_domain_from_json("{\"tag\":\"PoincareDisk\",\"C\":-1.0}", &d) == HK_STATUS_OK);
    double ratio = 0.0, expected = 0.0;
    CHECK(hk_domain_verify_dilation(d, 0.3, 0.0, 0.2, 0.4, &ratio, &expected) == HK_STATUS_OK);
    CHECK(fabs(ratio - expected) < 1e-8 * expected);

    HkKernel *k = NULL;
    CHECK(hk_kernel_from_expr(d, "eta / (1 + eta^2)", &k) == HK_STATUS_OK);
    double res = 1.0;
    int pass = 0;
    CHECK(hk_kernel_check_homogeneity(k, 200, 1e-10, 1, &res, &pass) == HK_STATUS_OK && pass == 1);

    HkKernel *bad = NULL;
    CHECK(hk_kernel_from_expr(d, "eta +", &bad) == HK_STATUS_INVALID_ARGUMENT && bad == NULL);
    char msg[256];
    CHECK(hk_last_error(msg, sizeof msg) > 0);

    double kappa = 0.0;
    int divergent = 1;
    CHECK(hk_hl_kappa("hlp:1/(x+y)", 2.0, &kappa, &divergent) == HK_STATUS_OK);
    CHECK(divergent == 0 && fabs(kappa - 3.14159265358979) < 1e-8);

    hk_kernel_free(k);
    hk_domain_free(d);
    printf("ok\n");
    return 0;
}
