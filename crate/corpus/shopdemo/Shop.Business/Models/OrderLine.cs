namespace Shop.Business.Models
{
    public class OrderLine
    {
        public int ProductId { get; set; }
        public int Quantity { get; set; }
        public decimal Price { get; set; }
    }
}
