int bufs_differ(const unsigned char *b1, const unsigned char *b2, unsigned int n)
{
  int ret = 0;
  for (unsigned int i = 0; i < n; i++) {
    if (b1[i] != b2[i]) {
      ret = 1;
      break;
    }
  }
  return ret;
}

int check_same(const unsigned char *x, const unsigned char *y, unsigned int len)
{
  int r = bufs_differ(x, y, len);
  return r;
}
