/* rex2d/m1: pthreads, 2 space-time dimensions, 1 processor. */
/* S: tile (p0, t0) at (p0, t0) */
/* Link with a definition of hsd_tile(node, p, t); call hsd_run(...). */

#include <limits.h>
#include <pthread.h>
#include <stdlib.h>
#include <string.h>

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

extern void hsd_tile(int node, const long *p, const long *t);
#define TILE(node, p, t) hsd_tile(node, p, t)

static long __lo[PROC_DIMS], __hi[PROC_DIMS];
static long *__Queue;
static long __nblocks, task_ptr;
static long *__STATUS_[NODES];
static pthread_mutex_t mutexptr = PTHREAD_MUTEX_INITIALIZER;
static pthread_mutex_t mutexsync = PTHREAD_MUTEX_INITIALIZER;
static pthread_cond_t sync_cv = PTHREAD_COND_INITIALIZER;

static long slot_of(const long *p) {
  long s = 0;
  for (int d = 0; d < PROC_DIMS; d++) s = s * (__hi[d] - __lo[d] + 1) + (p[d] - __lo[d]);
  return s;
}

static int reached(int node, const long *p, const long *t) {
  const long *cur = __STATUS_[node] + slot_of(p) * TIME_DIMS;
  for (int d = 0; d < TIME_DIMS; d++)
    if (cur[d] != t[d]) return cur[d] > t[d];
  return 1;
}

/* Returns once processor p of node has completed time t. */
static void check(int node, const long *p, const long *t) {
  int _counter = 0;
  pthread_mutex_lock(&mutexsync);
  while (!reached(node, p, t)) {
    _counter++;
    if (_counter > 2) {
      pthread_cond_wait(&sync_cv, &mutexsync);
    } else {
      pthread_mutex_unlock(&mutexsync);
      pthread_mutex_lock(&mutexsync);
    }
  }
  pthread_mutex_unlock(&mutexsync);
}

#define acquire(...) ((void)(__VA_ARGS__))

static void update(int node, const long *p, const long *t) {
  pthread_mutex_lock(&mutexsync);
  memcpy(__STATUS_[node] + slot_of(p) * TIME_DIMS, t, sizeof(long) * TIME_DIMS);
  pthread_cond_broadcast(&sync_cv);
  pthread_mutex_unlock(&mutexsync);
}

static void run_block(const long *p) {
  long p0 = p[0];
  long t0;
  for (t0 = 0; t0 <= N_b; t0++) {
    if (p0 >= 0 && p0 <= M_b && t0 >= 0 && t0 <= N_b) {
      if (p0 >= 1 && t0 >= 1) acquire(check(NODE_S, P(p0 - 1), T(t0))); /* e1 */
      if (p0 >= 1 && t0 == 0) acquire(check(NODE_S, P(p0 - 1), T(t0))); /* e2 */
      TILE(NODE_S, P(p0), T(t0));
      update(NODE_S, P(p0), T(t0));
    }
  }
}

static void *Process_block(void *arg) {
  long p[PROC_DIMS];
  (void)arg;
  for (;;) {
    /* the queue is in lex order, so this is the smallest unclaimed block */
    pthread_mutex_lock(&mutexptr);
    if (task_ptr == __nblocks) {
      pthread_mutex_unlock(&mutexptr);
      return NULL;
    }
    memcpy(p, __Queue + task_ptr * PROC_DIMS, sizeof p);
    task_ptr++;
    pthread_mutex_unlock(&mutexptr);
    run_block(p);
  }
}

static void note_block(const long *p) {
  for (int d = 0; d < PROC_DIMS; d++) {
    if (p[d] < __lo[d]) __lo[d] = p[d];
    if (p[d] > __hi[d]) __hi[d] = p[d];
  }
  __nblocks++;
}

static void enqueue_block(const long *p) {
  memcpy(__Queue + task_ptr * PROC_DIMS, p, sizeof(long) * PROC_DIMS);
  task_ptr++;
}

static void for_each_block(void (*visit)(const long *p)) {
  long p0;
  for (p0 = 0; p0 <= M_b; p0++) {
    if (p0 <= M_b && N_b >= 0 && p0 >= 0) visit(P(p0));
  }
}

int hsd_run(long M_b_, long N_b_, int nthreads) {
  M_b = M_b_;
  N_b = N_b_;
  long slots = 1;
  pthread_t *threads;
  __nblocks = 0;
  for (int d = 0; d < PROC_DIMS; d++) {
    __lo[d] = LONG_MAX;
    __hi[d] = LONG_MIN;
  }
  for_each_block(note_block);
  if (__nblocks == 0) return 0;
  __Queue = malloc(sizeof(long) * PROC_DIMS * __nblocks);
  task_ptr = 0;
  for_each_block(enqueue_block);
  task_ptr = 0;
  for (int d = 0; d < PROC_DIMS; d++) slots *= __hi[d] - __lo[d] + 1;
  for (int n = 0; n < NODES; n++) {
    __STATUS_[n] = calloc((size_t)(slots * TIME_DIMS), sizeof(long));
    for (long s = 0; s < slots; s++) __STATUS_[n][s * TIME_DIMS] = LONG_MIN;
  }
  threads = malloc(sizeof(pthread_t) * (size_t)nthreads);
  for (int i = 0; i < nthreads; i++) pthread_create(&threads[i], NULL, Process_block, NULL);
  for (int i = 0; i < nthreads; i++) pthread_join(threads[i], NULL);
  free(threads);
  for (int n = 0; n < NODES; n++) free(__STATUS_[n]);
  free(__Queue);
  return 0;
}
