/*@ requires \valid_read(b1 + (0 .. n-1));
    ensures \result == 0 || \result == 1;
    ensures \result == 0 <==> (\forall integer k; 0 <= k < n ==> b1[k] == b2[k]); */
int bufs_differ(const unsigned char *b1, const unsigned char *b2, unsigned int n)
{
  int ret = 0;
  /*@ loop invariant 0 <= i <= n; */
  for (unsigned int i = 0; i < n; i++) {
    if (b1[i] != b2[i]) {
      ret = 1;
      break;
    }
  }
  return ret;
}

/*@ ensures \result == 0 || \result == 1; */
int check_same(const unsigned char *x, const unsigned char *y, unsigned int len)
{
  int r = bufs_differ(x, y, len);
  /*@ assert r == 0 || r == 1; */
  return r;
}
