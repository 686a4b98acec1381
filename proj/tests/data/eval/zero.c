int zero(void)
{
  return 0;
}

int use_zero(void)
{
  int z = zero();
  /*@ assert z == 0; */
  return z;
}
