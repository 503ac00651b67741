/* rex2d/m1: generic stubs, 2 space-time dimensions, 1 processor. */
/* S: tile (p0, t0) at (p0, t0) */
/* Define CLAIM(p), ACQUIRE(...), CHECK(node, p, t), TILE(node, p, t) and
   UPDATE(node, p, t) before this file; call hsd_program(...). */

#define ceild(n, d) (((n) < 0) ? -((-(n)) / (d)) : ((n) + (d) - 1) / (d))
#define floord(n, d) (((n) < 0) ? -((-(n) + (d) - 1) / (d)) : (n) / (d))
#define max(a, b) ((a) > (b) ? (a) : (b))
#define min(a, b) ((a) < (b) ? (a) : (b))
#define P(...) ((const long[]){__VA_ARGS__})
#define T(...) ((const long[]){__VA_ARGS__})

#define PROC_DIMS 1
#define TIME_DIMS 1
enum { NODE_S = 0, NODES = 1 };

static long M_b, N_b;

static void run_block(const long *p) {
  long p0 = p[0];
  long t0;
  for (t0 = 0; t0 <= N_b; t0++) {
    if (p0 >= 0 && p0 <= M_b && t0 >= 0 && t0 <= N_b) {
      if (p0 >= 1 && t0 >= 1) ACQUIRE(CHECK(NODE_S, P(p0 - 1), T(t0))); /* e1 */
      if (p0 >= 1 && t0 == 0) ACQUIRE(CHECK(NODE_S, P(p0 - 1), T(t0))); /* e2 */
      TILE(NODE_S, P(p0), T(t0));
      UPDATE(NODE_S, P(p0), T(t0));
    }
  }
}

static void claim_and_run(const long *p) {
  CLAIM(p);
  run_block(p);
}

void hsd_program(long M_b_, long N_b_) {
  M_b = M_b_;
  N_b = N_b_;
  long p0;
  for (p0 = 0; p0 <= M_b; p0++) {
    if (p0 <= M_b && N_b >= 0 && p0 >= 0) claim_and_run(P(p0));
  }
}
