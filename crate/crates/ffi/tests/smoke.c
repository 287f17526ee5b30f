#include <math.h>
#include <stdio.h>
#include "crucispec.h"

int main(void) {
    CsModes *m = NULL;
    double pi2 = M_PI * M_PI;
    if (cs_modes_solve(CS_POTENTIAL_QUADRATIC, pi2, 2, &m) != CS_STATUS_OK) return 1;
    double mu = 0.0;
    int parity = -1;
    if (cs_modes_eigenvalue(m, 1, &mu, &parity) != CS_STATUS_OK) return 2;
    cs_modes_free(m);
    if (fabs(mu - 6.0 * M_PI) > 1e-6 || parity != 1) return 3;

    CsProfile *p = NULL;
    if (cs_profile_new(CS_PROFILE_KIND_RHOMBUS, -2.0, &p) != CS_STATUS_ERR_DOMAIN) return 4;
    char msg[256];
    if (cs_last_error_message(msg, sizeof msg) == 0) return 5;
    printf("version %s, mu_1 = %.10f, error: %s\n", cs_version(), mu, msg);
    return 0;
}
